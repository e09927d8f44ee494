// src/lm.cc

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

#include "htr/lm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "htr/common.h"

namespace htr {

namespace {

constexpr double kLn10 = 2.302585092994045684;

struct Discounts {
  double d[3];  // for counts 1, 2, >=3
  bool fallback;
};

// Chen-Goodman count-of-count estimates; degenerate statistics (any of
// n1..n4 zero, or a discount outside its valid range) fall back to a flat
// absolute discount of 0.5.
Discounts EstimateDiscounts(const std::vector<int>& counts) {
  long long n1 = 0, n2 = 0, n3 = 0, n4 = 0;
  for (int c : counts) {
    if (c == 1) ++n1;
    else if (c == 2) ++n2;
    else if (c == 3) ++n3;
    else if (c == 4) ++n4;
  }
  if (n1 > 0 && n2 > 0 && n3 > 0 && n4 > 0) {
    double y = static_cast<double>(n1) / (n1 + 2.0 * n2);
    double d1 = 1.0 - 2.0 * y * n2 / n1;
    double d2 = 2.0 - 3.0 * y * n3 / n2;
    double d3 = 3.0 - 4.0 * y * n4 / n3;
    if (d1 > 0 && d1 <= 1 && d2 > 0 && d2 <= 2 && d3 > 0 && d3 <= 3)
      return {{d1, d2, d3}, false};
  }
  return {{0.5, 0.5, 0.5}, true};
}

double PickDiscount(const Discounts& d, int count) {
  return count >= 3 ? d.d[2] : d.d[count - 1];
}

}  // namespace

BigramLM TrainBigramKn(const std::vector<std::vector<std::string>>& sentences,
                       int min_count) {
  bool any_nonempty = false;
  for (const auto& s : sentences)
    if (!s.empty()) any_nonempty = true;
  if (!any_nonempty) throw Error("TrainBigramKn: empty corpus");
  if (min_count < 1) throw Error("TrainBigramKn: min_count must be >= 1");

  std::map<std::string, int> raw_count;
  for (const auto& s : sentences)
    for (const auto& w : s) {
      if (w == kSentenceStart || w == kSentenceEnd || w == kUnknown)
        throw Error("TrainBigramKn: reserved token '" + w + "' in corpus");
      raw_count[w] += 1;
    }
  auto mapped = [&](const std::string& w) -> std::string {
    return raw_count[w] >= min_count ? w : kUnknown;
  };

  std::map<std::string, std::map<std::string, int>> bigram;
  for (const auto& s : sentences) {
    if (s.empty()) continue;
    std::string prev = kSentenceStart;
    for (const auto& w : s) {
      std::string m = mapped(w);
      bigram[prev][m] += 1;
      prev = m;
    }
    bigram[prev][kSentenceEnd] += 1;
  }

  BigramLM lm;
  std::set<std::string> vocab{kSentenceStart, kSentenceEnd, kUnknown};
  for (const auto& [u, conts] : bigram)
    for (const auto& [w, c] : conts) {
      vocab.insert(u);
      vocab.insert(w);
    }
  lm.vocab_.assign(vocab.begin(), vocab.end());
  std::vector<std::string> pred;
  for (const auto& w : lm.vocab_)
    if (w != kSentenceStart) pred.push_back(w);
  const double v_pred = static_cast<double>(pred.size());

  // Bigram-level discounts.
  std::vector<int> bigram_counts;
  for (const auto& [u, conts] : bigram)
    for (const auto& [w, c] : conts) bigram_counts.push_back(c);
  Discounts db = EstimateDiscounts(bigram_counts);
  lm.fallback_bigram_ = db.fallback;
  lm.d_bigram_[0] = db.d[0];
  lm.d_bigram_[1] = db.d[1];
  lm.d_bigram_[2] = db.d[2];

  // Continuation counts drive the lower-order distribution.
  std::map<std::string, int> ncont;
  for (const auto& [u, conts] : bigram)
    for (const auto& [w, c] : conts) ncont[w] += 1;
  long long n_bigram_types = 0;
  std::vector<int> cont_counts;
  for (const auto& [w, c] : ncont) {
    n_bigram_types += c;
    cont_counts.push_back(c);
  }
  Discounts du = EstimateDiscounts(cont_counts);
  lm.fallback_unigram_ = du.fallback;

  double gamma_uni = 0;
  for (const auto& [w, c] : ncont) gamma_uni += PickDiscount(du, c);
  gamma_uni /= static_cast<double>(n_bigram_types);
  if (!(gamma_uni > 0)) {  // keep every Puni strictly positive
    du = {{0.5, 0.5, 0.5}, true};
    lm.fallback_unigram_ = true;
    gamma_uni = 0;
    for (const auto& [w, c] : ncont) gamma_uni += PickDiscount(du, c);
    gamma_uni /= static_cast<double>(n_bigram_types);
  }

  auto puni = [&](const std::string& w) {
    auto it = ncont.find(w);
    double base = 0;
    if (it != ncont.end())
      base = (it->second - PickDiscount(du, it->second)) / n_bigram_types;
    return base + gamma_uni / v_pred;
  };

  for (const auto& w : pred)
    lm.unigram_log10_[w] = std::log10(puni(w));
  lm.unigram_log10_[kSentenceStart] = -99.0;  // never predicted

  for (const auto& [u, conts] : bigram) {
    long long ctot = 0;
    double discount_mass = 0;
    for (const auto& [w, c] : conts) {
      ctot += c;
      discount_mass += PickDiscount(db, c);
    }
    double gamma = discount_mass / static_cast<double>(ctot);
    lm.backoff_log10_[u] = std::log10(gamma);
    for (const auto& [w, c] : conts) {
      double p = (c - PickDiscount(db, c)) / static_cast<double>(ctot) +
                 gamma * puni(w);
      lm.bigram_log10_[u][w] = std::log10(p);
    }
  }
  return lm;
}

std::vector<std::string> BigramLM::PredictionVocab() const {
  std::vector<std::string> pred;
  for (const auto& w : vocab_)
    if (w != kSentenceStart) pred.push_back(w);
  return pred;
}

double BigramLM::LogProb(const std::string& prev,
                         const std::string& word) const {
  auto known = [&](const std::string& w) {
    return std::binary_search(vocab_.begin(), vocab_.end(), w);
  };
  const std::string& u = known(prev) ? prev : kUnknown;
  const std::string& w =
      (known(word) && word != kSentenceStart) ? word : kUnknown;

  auto uit = bigram_log10_.find(u);
  if (uit != bigram_log10_.end()) {
    auto wit = uit->second.find(w);
    if (wit != uit->second.end()) return wit->second * kLn10;
  }
  double bow = 0;
  auto bit = backoff_log10_.find(u);
  if (bit != backoff_log10_.end()) bow = bit->second;
  return (bow + unigram_log10_.at(w)) * kLn10;
}

double BigramLM::Perplexity(
    const std::vector<std::vector<std::string>>& sentences) const {
  long long n = 0;
  double total = 0;
  for (const auto& s : sentences) {
    std::string prev = kSentenceStart;
    for (const auto& w : s) {
      total += LogProb(prev, w);
      prev = w;
      ++n;
    }
    total += LogProb(prev, kSentenceEnd);
    ++n;
  }
  if (n == 0) throw Error("Perplexity: empty evaluation set");
  return std::exp(-total / static_cast<double>(n));
}

std::string BigramLM::ToArpa() const {
  size_t n_bigrams = 0;
  for (const auto& [u, conts] : bigram_log10_) n_bigrams += conts.size();
  std::string out;
  out += "\\data\\\n";
  out += "ngram 1=" + std::to_string(vocab_.size()) + "\n";
  out += "ngram 2=" + std::to_string(n_bigrams) + "\n";
  out += "\n\\1-grams:\n";
  for (const auto& w : vocab_) {
    out += FormatDouble(unigram_log10_.at(w)) + "\t" + w;
    auto bit = backoff_log10_.find(w);
    if (bit != backoff_log10_.end())
      out += "\t" + FormatDouble(bit->second);
    out += "\n";
  }
  out += "\n\\2-grams:\n";
  for (const auto& [u, conts] : bigram_log10_)
    for (const auto& [w, p] : conts)
      out += FormatDouble(p) + "\t" + u + " " + w + "\n";
  out += "\n\\end\\\n";
  return out;
}

BigramLM BigramLM::FromArpa(const std::string& text,
                            const std::string& origin) {
  BigramLM lm;
  std::istringstream in(text);
  std::string line;
  int section = 0;  // 0 = preamble, 1 = unigrams, 2 = bigrams, 3 = done
  std::set<std::string> vocab;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "\\data\\") continue;
    if (line.rfind("ngram ", 0) == 0) continue;
    if (line == "\\1-grams:") { section = 1; continue; }
    if (line == "\\2-grams:") { section = 2; continue; }
    if (line == "\\end\\") { section = 3; continue; }
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (section == 1) {
      if (fields.size() < 2 || fields.size() > 3)
        throw Error(origin + ": malformed unigram line '" + line + "'");
      lm.unigram_log10_[fields[1]] = ParseDouble(fields[0]);
      if (fields.size() == 3)
        lm.backoff_log10_[fields[1]] = ParseDouble(fields[2]);
      vocab.insert(fields[1]);
    } else if (section == 2) {
      if (fields.size() != 2)
        throw Error(origin + ": malformed bigram line '" + line + "'");
      auto words = SplitWords(fields[1]);
      if (words.size() != 2)
        throw Error(origin + ": malformed bigram key '" + fields[1] + "'");
      lm.bigram_log10_[words[0]][words[1]] = ParseDouble(fields[0]);
    } else {
      throw Error(origin + ": unexpected content outside sections: '" + line +
                  "'");
    }
  }
  if (section != 3) throw Error(origin + ": missing \\end\\ marker");
  if (!vocab.count(kUnknown) || !vocab.count(kSentenceStart) ||
      !vocab.count(kSentenceEnd))
    throw Error(origin + ": model lacks sentinel tokens");
  lm.vocab_.assign(vocab.begin(), vocab.end());
  return lm;
}

void BigramLM::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open file for writing");
  std::string text = ToArpa();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(path + ": write failed");
}

BigramLM BigramLM::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return FromArpa(ss.str(), path);
}

}  // namespace htr
