// include/htr/segmentation.h

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

#ifndef HTR_SEGMENTATION_H_
#define HTR_SEGMENTATION_H_

#include <vector>

#include "htr/corpus.h"
#include "htr/image.h"

namespace htr {

// A connected ink blob. center is the centroid of its ink pixels.
struct Component {
  Box bbox;
  double cx = 0;
  double cy = 0;
  int ink_count = 0;
};

// Components plus the per-pixel ownership map the line extractor needs to
// copy only its own ink into each strip. labels[y*width+x] indexes into
// components, -1 = background.
struct ComponentExtraction {
  std::vector<Component> components;
  std::vector<int32_t> labels;
  int width = 0;
  int height = 0;
};

struct BaselineSet {
  std::vector<double> baselines;  // y positions, strictly increasing
  double mean_gap = 0;            // 0 when fewer than 2 baselines
};

struct SegmentedLine {
  LineRecord record;  // image_path left empty; caller fills it on save
  GrayImage image;
};

struct SegmentationParams {
  int binarize_threshold = 128;  // ink = intensity < threshold
  int min_component_area = 4;
  double smoothing_sigma = 2.0;
  int bbox_pad = 2;
  int target_height = 64;
};

// 8-connected components of sub-threshold pixels with area >= min_area,
// sorted by (cy, cx). A blank page yields an empty result.
ComponentExtraction ExtractComponents(const GrayImage& page,
                                      int binarize_threshold, int min_area);

// Candidate baselines: local maxima of the Gaussian-smoothed histogram of
// component bottom edges. Peaks closer than half the median peak gap are
// merged, keeping the taller. Throws on an empty component list.
BaselineSet DetectBaselines(const std::vector<Component>& components,
                            double smoothing_sigma);

// Per-component baseline index. Nearest baseline by |cy - y|, except that a
// component farther than 0.75 * mean_gap goes to the nearest baseline below
// its center (diacritics). Distance ties go to the lower (larger-y) baseline.
std::vector<int> AssignComponents(const std::vector<Component>& components,
                                  const BaselineSet& baselines);

// One line per baseline that owns at least one component. bbox is the union
// of the assigned components' boxes padded and clipped to the page; the
// strip contains only those components' ink. Records are ordered
// top-to-bottom with 0-based line_index and status auto.
std::vector<SegmentedLine> ExtractLines(const GrayImage& page,
                                        const ComponentExtraction& extraction,
                                        const std::vector<int>& assignment,
                                        const BaselineSet& baselines,
                                        const std::string& page_id,
                                        int bbox_pad = 2);

// Height normalization to target_height (64 by default); width scales by the
// same factor, rounded, min 1. Already-normalized input is returned
// unchanged, which also makes the operation idempotent.
GrayImage NormalizeHeight(const GrayImage& line, int target_height = 64);

// Full per-page pass with the given parameters.
std::vector<SegmentedLine> SegmentPage(const GrayImage& page,
                                       const std::string& page_id,
                                       const SegmentationParams& params);

}  // namespace htr

#endif  // HTR_SEGMENTATION_H_
