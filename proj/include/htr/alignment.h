// include/htr/alignment.h

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

#ifndef HTR_ALIGNMENT_H_
#define HTR_ALIGNMENT_H_

#include <string>
#include <vector>

#include "htr/corpus.h"

namespace htr {

// Monotone mapping from recognized line positions to reference line
// positions, plus the lines the scan rejected.
struct AlignmentMap {
  std::vector<std::pair<int, int>> entries;  // (line position, ref position)
  std::vector<int> discarded;                // line positions
  double selected_fraction = 0;
  double mean_normalized_distance = 0;
};

struct ErrorRates {
  double ler = 0;  // character-level, raw recognizer output
  double cer = 0;  // character-level, final output
  double wer = 0;  // word-level
};

enum class Tokenizer { kChar, kWord };

// Unit-cost edit distance at code-point level. Empty strings allowed.
int Levenshtein(const std::string& a, const std::string& b);

// Same metric over pre-tokenized sequences (word-level rates).
int LevenshteinTokens(const std::vector<std::string>& a,
                      const std::vector<std::string>& b);

// Incremental transcript-to-line mapping: scan recognized lines in order
// against a reference cursor; a line maps (and advances the cursor) when
// its distance to the current reference is <= threshold * reference
// length, otherwise it is discarded and the cursor stays. Lines after
// reference exhaustion are discarded.
AlignmentMap MapLines(const std::vector<std::string>& recognized,
                      const std::vector<std::string>& reference,
                      double threshold = 0.5);

// Applies an AlignmentMap to line records: mapped lines become selected and
// get the mapped reference as transcript, discarded ones become discarded.
// Positions index into `lines`. Throws on out-of-range indices.
std::vector<LineRecord> SelectTrainingLines(
    const AlignmentMap& map, const std::vector<LineRecord>& lines,
    const std::vector<std::string>& reference);

// Corpus-level error rate: sum of per-line edit distances over the total
// reference token count, under the chosen tokenization. Throws on length
// mismatch or zero total reference length.
double ErrorRate(const std::vector<std::string>& refs,
                 const std::vector<std::string>& hyps, Tokenizer tokenizer);

// (before - after) / before; the relative-improvement figure reports use.
double RelativeImprovement(double before, double after);

}  // namespace htr

#endif  // HTR_ALIGNMENT_H_
