// src/recognizer.cc

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

#include "htr/recognizer.h"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>

#include "htr/common.h"
#include "htr/scale.h"

namespace htr {

namespace {

// splitmix64 finalizer; the per-frame hash behind the deterministic
// confusion draws.
uint64_t Mix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t MixN(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x243F6A8885A308D3ULL;
  for (uint64_t p : parts) h = Mix(h ^ p);
  return h;
}

double UnitFromHash(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void CheckConfig(const RecognizerConfig& cfg) {
  if (cfg.alphabet.empty()) throw Error("recognizer: empty alphabet");
  if (cfg.frames_per_char < 1)
    throw Error("recognizer: frames_per_char must be >= 1");
  if (cfg.noise < 0 || cfg.noise >= 1)
    throw Error("recognizer: noise must be in [0,1)");
  if (cfg.scale_sensitivity < 0)
    throw Error("recognizer: scale_sensitivity must be >= 0");
  if (!(cfg.preferred_scale > 0))
    throw Error("recognizer: preferred_scale must be positive");
}

}  // namespace

double EffectiveNoise(const RecognizerConfig& cfg, double observed_scale) {
  CheckConfig(cfg);
  if (!(observed_scale > 0))
    throw Error("recognizer: observed scale must be positive");
  double mismatch =
      cfg.scale_sensitivity * std::abs(std::log(observed_scale / cfg.preferred_scale));
  return std::min(0.95, cfg.noise + mismatch);
}

Posteriorgram SynthPosteriorgram(const std::string& text,
                                 double observed_scale,
                                 const RecognizerConfig& cfg) {
  const double eps = EffectiveNoise(cfg, observed_scale);
  const int A = static_cast<int>(cfg.alphabet.size());
  const int blank = A;
  const int d = cfg.frames_per_char;

  std::map<std::string, int> index;
  for (int i = 0; i < A; ++i) index[cfg.alphabet[i]] = i;
  std::vector<int> chars;
  for (char32_t cp : Utf8Decode(text)) {
    auto it = index.find(Utf8Encode(cp));
    if (it == index.end())
      throw Error("recognizer: character '" + Utf8Encode(cp) +
                  "' not in alphabet");
    chars.push_back(it->second);
  }

  const int L = static_cast<int>(chars.size());
  const int T = d * L + d;
  Posteriorgram pg;
  pg.frames = T;
  pg.alphabet = cfg.alphabet;
  pg.data.assign(static_cast<size_t>(T) * (A + 1), 0.0f);

  // One row at a time in double precision, then requantized to float and
  // renormalized so stored rows sum to 1 within the format tolerance.
  std::vector<double> row(A + 1);
  auto emit_row = [&](int t) {
    double sum = 0;
    for (double v : row) sum += v;
    for (int s = 0; s <= A; ++s) pg.At(t, s) = static_cast<float>(row[s] / sum);
    double fsum = 0;
    for (int s = 0; s <= A; ++s) fsum += pg.At(t, s);
    for (int s = 0; s <= A; ++s)
      pg.At(t, s) = static_cast<float>(pg.At(t, s) / fsum);
  };

  auto blank_row = [&](int t) {
    std::fill(row.begin(), row.end(), eps * 0.75 / A);
    row[blank] = 1.0 - eps * 0.75;
    emit_row(t);
  };

  // Two seeded alternates distinct from `sym` (fewer when the alphabet is
  // too small).
  auto confusion = [&](int pos, int f, int sym) {
    std::vector<int> alts;
    if (A >= 2) {
      int c1 = static_cast<int>(
          MixN({cfg.seed, static_cast<uint64_t>(pos), static_cast<uint64_t>(f), 11}) %
          static_cast<uint64_t>(A - 1));
      if (c1 >= sym) ++c1;
      alts.push_back(c1);
      if (A >= 3) {
        int c2 = static_cast<int>(
            MixN({cfg.seed, static_cast<uint64_t>(pos), static_cast<uint64_t>(f), 23}) %
            static_cast<uint64_t>(A - 2));
        for (int taken : {std::min(sym, c1), std::max(sym, c1)})
          if (c2 >= taken) ++c2;
        alts.push_back(c2);
      }
    }
    return alts;
  };

  for (int i = 0; i < L; ++i) {
    for (int f = 0; f < d; ++f) {
      int t = i * d + f;
      // Leading separator frame between equal neighbors, so the collapse
      // rule can keep the repeat. Needs d >= 2 to leave the character
      // visible.
      if (f == 0 && i > 0 && chars[i] == chars[i - 1]) {
        blank_row(t);
        continue;
      }
      std::vector<int> alts = confusion(i, f, chars[i]);
      int apparent = chars[i];
      double u = UnitFromHash(
          MixN({cfg.seed, static_cast<uint64_t>(i), static_cast<uint64_t>(f), 47}));
      if (!alts.empty() && u < 0.25 * eps) {
        apparent = alts[0];
        alts[0] = chars[i];
      }
      std::fill(row.begin(), row.end(), 0.2 * eps / (A + 1));
      row[blank] += 0.2 * eps;
      row[apparent] += 1.0 - eps;
      if (alts.empty()) {
        row[blank] += 0.6 * eps;
      } else {
        for (int a : alts) row[a] += 0.6 * eps / alts.size();
      }
      emit_row(t);
    }
  }
  for (int t = d * L; t < T; ++t) blank_row(t);

  ValidatePosteriorgram(pg);
  return pg;
}

Hypothesis RecognizeLine(const GrayImage& line, const std::string& hidden_truth,
                         const RecognizerConfig& cfg, const Lexicon& lexicon,
                         const BigramLM* lm, const DecodeParams& params) {
  double observed = ScaleScore(line);
  Posteriorgram pg = SynthPosteriorgram(hidden_truth, observed, cfg);
  return TokenPassingDecode(pg, lexicon, lm, params);
}

std::string RecognizeLineRaw(const GrayImage& line,
                             const std::string& hidden_truth,
                             const RecognizerConfig& cfg) {
  double observed = ScaleScore(line);
  return BestPathDecode(SynthPosteriorgram(hidden_truth, observed, cfg));
}

}  // namespace htr
