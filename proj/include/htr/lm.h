// include/htr/lm.h

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

#ifndef HTR_LM_H_
#define HTR_LM_H_

#include <map>
#include <string>
#include <vector>

namespace htr {

inline constexpr const char* kSentenceStart = "<s>";
inline constexpr const char* kSentenceEnd = "</s>";
inline constexpr const char* kUnknown = "<unk>";

// Interpolated bigram model with modified Kneser-Ney discounting. The
// queryable state is held in log10 (the ARPA unit) so serialization
// round-trips bit-exactly; natural-log conversion happens at query time.
//
// Seen bigrams store the fully interpolated P(w|u); an unseen pair scores
// backoff(u) * Puni(w), where Puni is the discounted continuation
// distribution interpolated with uniform 1/|prediction vocab| so every
// probability is strictly positive.
class BigramLM {
 public:
  // Natural-log probability; OOV tokens (and "<s>" as a predicted word)
  // map to <unk>. Never -inf.
  double LogProb(const std::string& prev, const std::string& word) const;

  // exp(-(1/N) sum log P) with N counting words plus one </s> per sentence.
  double Perplexity(const std::vector<std::vector<std::string>>& sentences) const;

  const std::vector<std::string>& vocab() const { return vocab_; }
  // Every vocab token except <s>; the event space queries normalize over.
  std::vector<std::string> PredictionVocab() const;

  bool discount_fallback_bigram() const { return fallback_bigram_; }
  bool discount_fallback_unigram() const { return fallback_unigram_; }
  const double* bigram_discounts() const { return d_bigram_; }

  // ARPA-style text form: sorted n-gram sections, log10 values, optional
  // backoff column. Identical training input yields identical bytes.
  std::string ToArpa() const;
  static BigramLM FromArpa(const std::string& text, const std::string& origin);
  void Save(const std::string& path) const;
  static BigramLM Load(const std::string& path);

  friend BigramLM TrainBigramKn(
      const std::vector<std::vector<std::string>>& sentences, int min_count);

 private:
  std::vector<std::string> vocab_;                  // sorted
  std::map<std::string, double> unigram_log10_;     // <s> pinned at -99
  std::map<std::string, std::map<std::string, double>> bigram_log10_;
  std::map<std::string, double> backoff_log10_;     // absent = 0 (weight 1)
  bool fallback_bigram_ = false;
  bool fallback_unigram_ = false;
  double d_bigram_[3] = {0, 0, 0};
};

// Trains from line transcripts tokenized into words. Words rarer than
// min_count collapse to <unk>. Throws if no nonempty sentence exists.
BigramLM TrainBigramKn(const std::vector<std::vector<std::string>>& sentences,
                       int min_count = 1);

}  // namespace htr

#endif  // HTR_LM_H_
