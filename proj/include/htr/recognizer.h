// include/htr/recognizer.h

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

#ifndef HTR_RECOGNIZER_H_
#define HTR_RECOGNIZER_H_

#include <string>
#include <vector>

#include "htr/ctc.h"
#include "htr/image.h"

namespace htr {

// Configuration of the synthetic recognizer. Noise grows with the mismatch
// between the observed writing scale and the scale the model "prefers",
// emulating an optical model trained at one scale and tested at another.
struct RecognizerConfig {
  std::vector<std::string> alphabet;
  int frames_per_char = 4;      // d; adjacent repeats need d >= 2
  double noise = 0.0;           // epsilon in [0,1)
  double scale_sensitivity = 0; // kappa >= 0
  double preferred_scale = 32;  // score value the model was "trained" at
  uint64_t seed = 1;
};

// min(0.95, noise + kappa * |ln(observed / preferred)|); symmetric in
// enlargement vs reduction of the same factor.
double EffectiveNoise(const RecognizerConfig& cfg, double observed_scale);

// Emits T = d*len(text) + d frames: d frames per character with mass
// 1 - eps on the true symbol and eps spread over a seeded confusion set,
// plus a trailing blank region. The leading frame of a repeated character
// turns blank so the CTC collapse can keep the repeat. Deterministic in
// (text, observed_scale, cfg).
Posteriorgram SynthPosteriorgram(const std::string& text,
                                 double observed_scale,
                                 const RecognizerConfig& cfg);

// Full line recognition: scale is measured from the image, the hidden
// ground truth drives the synthetic posteriorgram (the production
// signature keeps the image; only tests and the synthetic pipeline supply
// the side channel), then the token-passing decoder runs.
Hypothesis RecognizeLine(const GrayImage& line, const std::string& hidden_truth,
                         const RecognizerConfig& cfg, const Lexicon& lexicon,
                         const BigramLM* lm, const DecodeParams& params);

// Raw (LM-free) reading of a line: best-path over the synthetic
// posteriorgram. This is what the bootstrap label-error figures use.
std::string RecognizeLineRaw(const GrayImage& line,
                             const std::string& hidden_truth,
                             const RecognizerConfig& cfg);

}  // namespace htr

#endif  // HTR_RECOGNIZER_H_
