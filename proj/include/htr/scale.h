// include/htr/scale.h

// Copyright 2026  htrpipe authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HTR_SCALE_H_
#define HTR_SCALE_H_

#include <vector>

#include "htr/image.h"

namespace htr {

// Result of classifying per-line scale scores into k contiguous classes
// (0 = Small upward). breaks holds the lower-bound score of each class
// from class 1 on; class_means is E(class) used for augmentation factors.
struct ScaleClassification {
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<double> breaks;
  std::vector<double> class_means;
};

struct AugmentationItem {
  int line_index;
  int source_class;
  int target_class;
  double factor;  // class_means[target] / class_means[source]
};

struct AugmentationPlan {
  std::vector<AugmentationItem> items;
};

enum class RescaleMode {
  kFree,             // both dimensions scale (training augmentation)
  kCanvasPreserving  // vertical scale recentered on the original canvas
};

// Vertical scale score: height of the core band, the longest contiguous
// run of rows whose ink count is at least half the maximum row ink count.
// Throws on a blank image.
int ScaleScore(const GrayImage& line, int binarize_threshold = 128);

// Exact Jenks natural breaks by dynamic programming: contiguous partition
// of the sorted scores into k classes minimizing within-class squared
// deviation. Equal-objective ties resolve to the partition whose later
// classes are smallest (breaks pushed right).
ScaleClassification JenksClassify(const std::vector<double>& scores, int k = 3);

// Objective value of a classification (sum of within-class squared
// deviations); exposed for the exhaustive-search cross-check.
double JenksObjective(const std::vector<double>& scores,
                      const std::vector<int>& labels, int k);

// One item per (line, other class) pair: 2 * n items for 3 classes.
// Throws if any class is empty (the factor would be undefined).
AugmentationPlan PlanAugmentation(const ScaleClassification& cls);

// factor 1.0 returns the input unchanged in either mode. Free mode
// resamples both dimensions; canvas mode resamples vertically and then
// pads or crops back to the original height so the scale change survives
// downstream height normalization.
GrayImage RescaleInk(const GrayImage& line, double factor, RescaleMode mode);

}  // namespace htr

#endif  // HTR_SCALE_H_
