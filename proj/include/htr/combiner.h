// include/htr/combiner.h

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

#ifndef HTR_COMBINER_H_
#define HTR_COMBINER_H_

#include <optional>
#include <string>
#include <vector>

#include "htr/ctc.h"
#include "htr/image.h"
#include "htr/recognizer.h"

namespace htr {

// One deterministically rescaled rendition of a test line. theta is the
// hidden scale factor being marginalized; prior_weight its (uniform by
// default) prior.
struct ScaleVariant {
  double theta = 1.0;
  GrayImage image;
  double prior_weight = 0;
};

inline const std::vector<double>& DefaultScaleGrid() {
  static const std::vector<double> grid = {0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3};
  return grid;
}

// Slot-aligned lattice of competing words. Every source hypothesis
// contributes exactly one entry per slot; absent words appear as NULL
// entries (word == nullopt).
struct WtnEntry {
  std::optional<std::string> word;
  double confidence = 0;  // meaningful only for word entries
  int source = 0;         // hypothesis id
};

struct WordTransitionNetwork {
  std::vector<std::vector<WtnEntry>> slots;
  int num_sources = 0;
};

// Canvas-preserving rescaling of the line at each grid factor; the 1.0
// variant is pixel-identical to the input. Uniform prior weights.
std::vector<ScaleVariant> GenScaleVariants(
    const GrayImage& line, const std::vector<double>& grid = DefaultScaleGrid());

// The first hypothesis seeds the network; each next one is aligned to the
// current slots by edit-distance DP (match 0, substitution 1,
// NULL-insertion 1; ties prefer match, then substitution, then skipping a
// slot, then opening a new one).
WordTransitionNetwork BuildWtn(const std::vector<Hypothesis>& hyps);

// Per slot pick argmax of alpha * votes/N + (1-alpha) * conf, where
// conf(word) is the best confidence among that word's entries and
// conf(NULL) = null_conf. Ties go to the higher vote count, then to words
// over NULL, then to the lexicographically smallest word. Chosen NULLs
// drop out of the word sequence.
Hypothesis RoverVote(const WordTransitionNetwork& wtn, double alpha = 0.7,
                     double null_conf = 0.5);

// The model-based normalization scheme end to end: recognize every scale
// variant of the line and combine the hypotheses by ROVER.
Hypothesis NormalizeAndRecognize(const GrayImage& line,
                                 const std::string& hidden_truth,
                                 const RecognizerConfig& cfg,
                                 const Lexicon& lexicon, const BigramLM* lm,
                                 const DecodeParams& params,
                                 const std::vector<double>& grid = DefaultScaleGrid(),
                                 double alpha = 0.7, double null_conf = 0.5);

}  // namespace htr

#endif  // HTR_COMBINER_H_
