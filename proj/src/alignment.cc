// src/alignment.cc

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

#include "htr/alignment.h"

#include <algorithm>

#include "htr/common.h"

namespace htr {

namespace {

// Two-row DP, unit costs.
template <typename Seq>
int EditDistance(const Seq& a, const Seq& b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

int Levenshtein(const std::string& a, const std::string& b) {
  return EditDistance(Utf8Decode(a), Utf8Decode(b));
}

int LevenshteinTokens(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  return EditDistance(a, b);
}

AlignmentMap MapLines(const std::vector<std::string>& recognized,
                      const std::vector<std::string>& reference,
                      double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw Error("MapLines: threshold must be in (0,1]");
  AlignmentMap map;
  size_t ref_cursor = 0;
  double dist_sum = 0;
  for (size_t i = 0; i < recognized.size(); ++i) {
    if (ref_cursor >= reference.size()) {
      map.discarded.push_back(static_cast<int>(i));
      continue;
    }
    const std::string& ref = reference[ref_cursor];
    size_t ref_len = Utf8Length(ref);
    int dist = Levenshtein(recognized[i], ref);
    if (dist <= threshold * static_cast<double>(ref_len)) {
      map.entries.emplace_back(static_cast<int>(i),
                               static_cast<int>(ref_cursor));
      dist_sum += ref_len > 0 ? dist / static_cast<double>(ref_len) : 0.0;
      ++ref_cursor;
    } else {
      map.discarded.push_back(static_cast<int>(i));
    }
  }
  map.selected_fraction =
      recognized.empty()
          ? 0.0
          : static_cast<double>(map.entries.size()) / recognized.size();
  map.mean_normalized_distance =
      map.entries.empty() ? 0.0 : dist_sum / map.entries.size();
  return map;
}

std::vector<LineRecord> SelectTrainingLines(
    const AlignmentMap& map, const std::vector<LineRecord>& lines,
    const std::vector<std::string>& reference) {
  std::vector<LineRecord> out = lines;
  for (const auto& [line_pos, ref_pos] : map.entries) {
    if (line_pos < 0 || line_pos >= static_cast<int>(out.size()))
      throw Error("SelectTrainingLines: line position " +
                  std::to_string(line_pos) + " out of range");
    if (ref_pos < 0 || ref_pos >= static_cast<int>(reference.size()))
      throw Error("SelectTrainingLines: reference position " +
                  std::to_string(ref_pos) + " out of range");
    out[line_pos].status = LineStatus::kSelected;
    out[line_pos].transcript = reference[ref_pos];
  }
  for (int line_pos : map.discarded) {
    if (line_pos < 0 || line_pos >= static_cast<int>(out.size()))
      throw Error("SelectTrainingLines: discarded position " +
                  std::to_string(line_pos) + " out of range");
    out[line_pos].status = LineStatus::kDiscarded;
    out[line_pos].transcript.reset();
  }
  return out;
}

double ErrorRate(const std::vector<std::string>& refs,
                 const std::vector<std::string>& hyps, Tokenizer tokenizer) {
  if (refs.size() != hyps.size())
    throw Error("ErrorRate: reference/hypothesis list length mismatch (" +
                std::to_string(refs.size()) + " vs " +
                std::to_string(hyps.size()) + ")");
  long long dist = 0, total = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    if (tokenizer == Tokenizer::kChar) {
      dist += Levenshtein(refs[i], hyps[i]);
      total += static_cast<long long>(Utf8Length(refs[i]));
    } else {
      dist += LevenshteinTokens(SplitWords(refs[i]), SplitWords(hyps[i]));
      total += static_cast<long long>(SplitWords(refs[i]).size());
    }
  }
  if (total == 0) throw Error("ErrorRate: zero total reference length");
  return static_cast<double>(dist) / static_cast<double>(total);
}

double RelativeImprovement(double before, double after) {
  if (before == 0) throw Error("RelativeImprovement: zero baseline");
  return (before - after) / before;
}

}  // namespace htr
