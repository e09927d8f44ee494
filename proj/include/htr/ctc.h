// include/htr/ctc.h

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

#ifndef HTR_CTC_H_
#define HTR_CTC_H_

#include <map>
#include <string>
#include <vector>

#include "htr/lm.h"

namespace htr {

// Per-frame label posteriors: T rows of A+1 probabilities, the last column
// being the CTC blank. Alphabet symbols are single code points, stored
// UTF-8 encoded.
struct Posteriorgram {
  int frames = 0;
  std::vector<std::string> alphabet;
  std::vector<float> data;  // row-major, stride alphabet.size() + 1

  int num_symbols() const { return static_cast<int>(alphabet.size()); }
  int blank_index() const { return num_symbols(); }
  double Prob(int t, int sym) const {
    return data[static_cast<size_t>(t) * (alphabet.size() + 1) + sym];
  }
  float& At(int t, int sym) {
    return data[static_cast<size_t>(t) * (alphabet.size() + 1) + sym];
  }
};

// Rows must sum to 1 within 1e-6 with nonnegative entries; symbols must be
// unique single code points without whitespace.
void ValidatePosteriorgram(const Posteriorgram& pg);

// File format: "PGM2 <T> <A+1>\n<symbols space-separated>\n" followed by
// T*(A+1) little-endian 32-bit floats, row-major.
Posteriorgram ReadPosteriorgram(const std::string& path);
void WritePosteriorgram(const Posteriorgram& pg, const std::string& path);
Posteriorgram DecodePosteriorgram(const std::string& bytes,
                                  const std::string& origin);
std::string EncodePosteriorgram(const Posteriorgram& pg);

// Word -> alphabet symbol index sequence. Construction rejects words with
// characters outside the alphabet and empty words.
class Lexicon {
 public:
  Lexicon(const std::vector<std::string>& words,
          const std::vector<std::string>& alphabet);
  size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(size_t i) const { return words_[i]; }
  const std::vector<int>& chars(size_t i) const { return chars_[i]; }

 private:
  std::vector<std::string> words_;
  std::vector<std::vector<int>> chars_;
};

struct Hypothesis {
  std::vector<std::string> words;
  double total_score = 0;                 // log domain
  std::vector<double> word_confidences;   // one per word, in [0,1]
};

struct DecodeParams {
  double lm_scale = 1.0;    // gamma
  double word_penalty = 0;  // rho, added once per word
  int beam = 64;            // live tokens kept per frame; 0 = unlimited
};

// The CTC many-to-one map: merge adjacent repeats, then drop blanks.
// `path` holds symbol indices with alphabet.size() meaning blank.
std::string CtcCollapse(const std::vector<int>& path,
                        const std::vector<std::string>& alphabet);

// log sum over all label paths collapsing to `target`, standard forward
// recursion over the blank-augmented target. Returns the kLogZero marker
// when T cannot fit the target. Throws on characters outside the alphabet.
double CtcForwardLogProb(const Posteriorgram& pg, const std::string& target);

// Per-frame argmax (ties to the lowest index) followed by CtcCollapse.
std::string BestPathDecode(const Posteriorgram& pg);

// Lexicon-constrained decoding: searches word sequences scored by
//   log P_ctc(concatenated characters) + gamma * sum log P(w_i|w_{i-1})
//   + rho * word count,
// with P(w_1|<s>) starting the chain. Each token is a word-sequence
// hypothesis carrying forward masses over its blank-augmented state chain,
// so with beam = 0 (unlimited) the result is the exact argmax. `lm` may be
// null only when lm_scale is 0.
Hypothesis TokenPassingDecode(const Posteriorgram& pg, const Lexicon& lexicon,
                              const BigramLM* lm, const DecodeParams& params);

}  // namespace htr

#endif  // HTR_CTC_H_
