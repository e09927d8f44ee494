// include/htr/common.h

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

#ifndef HTR_COMMON_H_
#define HTR_COMMON_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace htr {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Log-domain floor standing in for "impossible" (avoids -inf arithmetic).
constexpr double kLogZero = -1e30;

inline bool IsLogZero(double x) { return x <= kLogZero * 0.5; }

inline double LogAdd(double a, double b) {
  if (IsLogZero(a)) return b;
  if (IsLogZero(b)) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// Deterministic RNG: mt19937_64 core (sequence pinned by the standard)
// with explicit helpers instead of std distributions, whose output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), n >= 1. Rejection keeps it unbiased.
  uint64_t NextIndex(uint64_t n) {
    if (n == 0) throw Error("Rng::NextIndex: n must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  int NextInt(int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(NextIndex(static_cast<uint64_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

// UTF-8 <-> code points. Transcripts are stored verbatim and compared at
// code-point level; invalid sequences are rejected.
std::vector<char32_t> Utf8Decode(const std::string& s);
std::string Utf8Encode(const std::vector<char32_t>& cps);
std::string Utf8Encode(char32_t cp);

// Code-point count of a UTF-8 string.
inline size_t Utf8Length(const std::string& s) { return Utf8Decode(s).size(); }

// Whitespace-run tokenization (word-level metrics and LM sentences).
std::vector<std::string> SplitWords(const std::string& line);

// Shortest round-trip decimal formatting (std::to_chars); parse(Format(x))
// returns x bit-exactly, which the byte-stable file formats rely on.
std::string FormatDouble(double x);
double ParseDouble(const std::string& s);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be
// written into per-index slots so assembly order never matters.
void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn);

// FNV-1a 64-bit, used for config fingerprints in reports.
uint64_t Fnv1a64(const std::string& bytes);

}  // namespace htr

#endif  // HTR_COMMON_H_
