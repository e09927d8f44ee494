// src/combiner.cc

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

#include "htr/combiner.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "htr/common.h"
#include "htr/scale.h"

namespace htr {

std::vector<ScaleVariant> GenScaleVariants(const GrayImage& line,
                                           const std::vector<double>& grid) {
  if (grid.empty()) throw Error("GenScaleVariants: empty factor grid");
  std::vector<ScaleVariant> variants;
  variants.reserve(grid.size());
  for (double theta : grid) {
    ScaleVariant v;
    v.theta = theta;
    v.image = RescaleInk(line, theta, RescaleMode::kCanvasPreserving);
    v.prior_weight = 1.0 / static_cast<double>(grid.size());
    variants.push_back(std::move(v));
  }
  return variants;
}

WordTransitionNetwork BuildWtn(const std::vector<Hypothesis>& hyps) {
  if (hyps.empty()) throw Error("BuildWtn: no hypotheses");
  WordTransitionNetwork wtn;
  wtn.num_sources = static_cast<int>(hyps.size());

  auto conf_of = [](const Hypothesis& h, size_t j) {
    return j < h.word_confidences.size() ? h.word_confidences[j] : 0.0;
  };

  for (size_t j = 0; j < hyps[0].words.size(); ++j)
    wtn.slots.push_back({{hyps[0].words[j], conf_of(hyps[0], j), 0}});

  for (size_t k = 1; k < hyps.size(); ++k) {
    const auto& words = hyps[k].words;
    const size_t n = wtn.slots.size(), m = words.size();

    auto slot_has = [&](size_t i, const std::string& w) {
      for (const auto& e : wtn.slots[i])
        if (e.word && *e.word == w) return true;
      return false;
    };

    // Edit-distance DP between existing slots and the new word string.
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= n; ++i)
      for (size_t j = 1; j <= m; ++j) {
        int diag = dp[i - 1][j - 1] + (slot_has(i - 1, words[j - 1]) ? 0 : 1);
        dp[i][j] = std::min({diag, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
      }

    // Backtrace, preferring match, then substitution, then giving the slot
    // a NULL, then opening a new slot.
    enum class Op { kAlign, kSlotNull, kNewSlot };
    std::vector<Op> ops;
    size_t i = n, j = m;
    while (i > 0 || j > 0) {
      if (i > 0 && j > 0) {
        int cost = slot_has(i - 1, words[j - 1]) ? 0 : 1;
        if (dp[i][j] == dp[i - 1][j - 1] + cost &&
            (cost == 0 || (dp[i][j] != dp[i - 1][j - 1]))) {
          ops.push_back(Op::kAlign);
          --i;
          --j;
          continue;
        }
      }
      if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
        ops.push_back(Op::kSlotNull);
        --i;
        continue;
      }
      ops.push_back(Op::kNewSlot);
      --j;
    }
    std::reverse(ops.begin(), ops.end());

    std::vector<std::vector<WtnEntry>> merged;
    i = 0;
    j = 0;
    for (Op op : ops) {
      switch (op) {
        case Op::kAlign: {
          auto slot = wtn.slots[i++];
          slot.push_back({words[j], conf_of(hyps[k], j), static_cast<int>(k)});
          merged.push_back(std::move(slot));
          ++j;
          break;
        }
        case Op::kSlotNull: {
          auto slot = wtn.slots[i++];
          slot.push_back({std::nullopt, 0.0, static_cast<int>(k)});
          merged.push_back(std::move(slot));
          break;
        }
        case Op::kNewSlot: {
          std::vector<WtnEntry> slot;
          for (size_t src = 0; src < k; ++src)
            slot.push_back({std::nullopt, 0.0, static_cast<int>(src)});
          slot.push_back({words[j], conf_of(hyps[k], j), static_cast<int>(k)});
          merged.push_back(std::move(slot));
          ++j;
          break;
        }
      }
    }
    wtn.slots = std::move(merged);
  }
  return wtn;
}

Hypothesis RoverVote(const WordTransitionNetwork& wtn, double alpha,
                     double null_conf) {
  if (alpha < 0 || alpha > 1) throw Error("RoverVote: alpha must be in [0,1]");
  if (null_conf < 0 || null_conf > 1)
    throw Error("RoverVote: null_conf must be in [0,1]");
  const double n = static_cast<double>(wtn.num_sources);
  if (n < 1) throw Error("RoverVote: network has no sources");

  Hypothesis out;
  double total = 0;
  for (const auto& slot : wtn.slots) {
    struct Candidate {
      std::optional<std::string> word;
      int votes = 0;
      double conf = 0;
    };
    std::map<std::string, Candidate> words;
    Candidate null_cand{std::nullopt, 0, null_conf};
    for (const auto& e : slot) {
      if (!e.word) {
        null_cand.votes += 1;
      } else {
        auto& c = words[*e.word];
        c.word = e.word;
        c.votes += 1;
        c.conf = std::max(c.conf, e.confidence);
      }
    }

    auto score = [&](const Candidate& c) {
      return alpha * c.votes / n + (1 - alpha) * c.conf;
    };
    const Candidate* best = &null_cand;
    for (const auto& [w, c] : words) {
      double sc = score(c), sb = score(*best);
      bool wins = sc > sb ||
                  (sc == sb && (c.votes > best->votes ||
                                (c.votes == best->votes &&
                                 (!best->word || *c.word < *best->word))));
      if (wins) best = &c;
    }
    if (best->word) {
      out.words.push_back(*best->word);
      double sc = std::clamp(score(*best), 0.0, 1.0);
      out.word_confidences.push_back(sc);
      total += std::log(std::max(sc, 1e-300));
    }
  }
  out.total_score = total;
  return out;
}

Hypothesis NormalizeAndRecognize(const GrayImage& line,
                                 const std::string& hidden_truth,
                                 const RecognizerConfig& cfg,
                                 const Lexicon& lexicon, const BigramLM* lm,
                                 const DecodeParams& params,
                                 const std::vector<double>& grid, double alpha,
                                 double null_conf) {
  std::vector<ScaleVariant> variants = GenScaleVariants(line, grid);
  std::vector<Hypothesis> hyps;
  hyps.reserve(variants.size());
  for (const auto& v : variants)
    hyps.push_back(RecognizeLine(v.image, hidden_truth, cfg, lexicon, lm, params));
  return RoverVote(BuildWtn(hyps), alpha, null_conf);
}

}  // namespace htr
