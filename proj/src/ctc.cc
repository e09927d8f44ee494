// src/ctc.cc

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

#include "htr/ctc.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "htr/common.h"

namespace htr {

void ValidatePosteriorgram(const Posteriorgram& pg) {
  if (pg.frames < 1) throw Error("posteriorgram: frame count must be >= 1");
  if (pg.alphabet.empty()) throw Error("posteriorgram: empty alphabet");
  std::vector<std::string> seen;
  for (const auto& sym : pg.alphabet) {
    if (sym.empty()) throw Error("posteriorgram: empty alphabet symbol");
    if (Utf8Decode(sym).size() != 1)
      throw Error("posteriorgram: alphabet symbol '" + sym +
                  "' is not a single code point");
    if (sym.find_first_of(" \t\r\n") != std::string::npos)
      throw Error("posteriorgram: alphabet symbol contains whitespace");
    seen.push_back(sym);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error("posteriorgram: duplicate alphabet symbol");
  size_t stride = pg.alphabet.size() + 1;
  if (pg.data.size() != stride * pg.frames)
    throw Error("posteriorgram: data size inconsistent with T x (A+1)");
  for (int t = 0; t < pg.frames; ++t) {
    double sum = 0;
    for (size_t s = 0; s < stride; ++s) {
      double v = pg.data[t * stride + s];
      if (v < 0) throw Error("posteriorgram: negative probability at frame " +
                             std::to_string(t));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw Error("posteriorgram: frame " + std::to_string(t) +
                  " sums to " + FormatDouble(sum) + ", not 1");
  }
}

std::string EncodePosteriorgram(const Posteriorgram& pg) {
  ValidatePosteriorgram(pg);
  std::string out = "PGM2 " + std::to_string(pg.frames) + " " +
                    std::to_string(pg.alphabet.size() + 1) + "\n";
  for (size_t i = 0; i < pg.alphabet.size(); ++i) {
    if (i) out += " ";
    out += pg.alphabet[i];
  }
  out += "\n";
  for (float v : pg.data) {
    uint32_t bits = std::bit_cast<uint32_t>(v);
    out.push_back(static_cast<char>(bits & 0xFF));
    out.push_back(static_cast<char>((bits >> 8) & 0xFF));
    out.push_back(static_cast<char>((bits >> 16) & 0xFF));
    out.push_back(static_cast<char>((bits >> 24) & 0xFF));
  }
  return out;
}

Posteriorgram DecodePosteriorgram(const std::string& bytes,
                                  const std::string& origin) {
  size_t eol1 = bytes.find('\n');
  if (eol1 == std::string::npos)
    throw Error(origin + ": missing posteriorgram header");
  std::istringstream head(bytes.substr(0, eol1));
  std::string magic;
  long t = 0, cols = 0;
  head >> magic >> t >> cols;
  if (magic != "PGM2" || head.fail())
    throw Error(origin + ": malformed posteriorgram header");
  if (t < 1 || cols < 2)
    throw Error(origin + ": bad posteriorgram dimensions");
  size_t eol2 = bytes.find('\n', eol1 + 1);
  if (eol2 == std::string::npos)
    throw Error(origin + ": missing alphabet line");
  Posteriorgram pg;
  pg.frames = static_cast<int>(t);
  pg.alphabet = SplitWords(bytes.substr(eol1 + 1, eol2 - eol1 - 1));
  if (static_cast<long>(pg.alphabet.size()) + 1 != cols)
    throw Error(origin + ": alphabet size disagrees with header columns");
  size_t need = static_cast<size_t>(t) * cols * 4;
  if (bytes.size() - eol2 - 1 < need)
    throw Error(origin + ": truncated posteriorgram payload");
  pg.data.resize(static_cast<size_t>(t) * cols);
  const char* p = bytes.data() + eol2 + 1;
  for (size_t i = 0; i < pg.data.size(); ++i) {
    uint32_t bits = static_cast<uint8_t>(p[4 * i]) |
                    (static_cast<uint32_t>(static_cast<uint8_t>(p[4 * i + 1])) << 8) |
                    (static_cast<uint32_t>(static_cast<uint8_t>(p[4 * i + 2])) << 16) |
                    (static_cast<uint32_t>(static_cast<uint8_t>(p[4 * i + 3])) << 24);
    pg.data[i] = std::bit_cast<float>(bits);
  }
  ValidatePosteriorgram(pg);
  return pg;
}

Posteriorgram ReadPosteriorgram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return DecodePosteriorgram(ss.str(), path);
}

void WritePosteriorgram(const Posteriorgram& pg, const std::string& path) {
  std::string bytes = EncodePosteriorgram(pg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open file for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(path + ": write failed");
}

namespace {

std::map<std::string, int> SymbolIndex(const std::vector<std::string>& alphabet) {
  std::map<std::string, int> index;
  for (size_t i = 0; i < alphabet.size(); ++i)
    index[alphabet[i]] = static_cast<int>(i);
  return index;
}

// Target string -> symbol indices; throws on characters outside the alphabet.
std::vector<int> TargetToSymbols(const std::string& target,
                                 const std::vector<std::string>& alphabet) {
  auto index = SymbolIndex(alphabet);
  std::vector<int> out;
  for (char32_t cp : Utf8Decode(target)) {
    auto it = index.find(Utf8Encode(cp));
    if (it == index.end())
      throw Error("character '" + Utf8Encode(cp) + "' not in alphabet");
    out.push_back(it->second);
  }
  return out;
}

double SafeLog(double p) { return p > 0 ? std::log(p) : kLogZero; }

}  // namespace

Lexicon::Lexicon(const std::vector<std::string>& words,
                 const std::vector<std::string>& alphabet) {
  for (const auto& w : words) {
    if (w.empty()) throw Error("Lexicon: empty word");
    chars_.push_back(TargetToSymbols(w, alphabet));
    words_.push_back(w);
  }
}

std::string CtcCollapse(const std::vector<int>& path,
                        const std::vector<std::string>& alphabet) {
  const int blank = static_cast<int>(alphabet.size());
  std::string out;
  int prev = blank;
  for (int sym : path) {
    if (sym < 0 || sym > blank)
      throw Error("CtcCollapse: symbol index out of range");
    if (sym != prev && sym != blank) out += alphabet[sym];
    prev = sym;
  }
  return out;
}

double CtcForwardLogProb(const Posteriorgram& pg, const std::string& target) {
  ValidatePosteriorgram(pg);
  std::vector<int> chars = TargetToSymbols(target, pg.alphabet);
  const int blank = pg.blank_index();
  const int L = static_cast<int>(chars.size());
  const int S = 2 * L + 1;  // blank, c1, blank, c2, ..., cL, blank

  // Minimal frames: each char needs one, plus a separating blank between
  // equal neighbors.
  int min_frames = L;
  for (int i = 1; i < L; ++i)
    if (chars[i] == chars[i - 1]) ++min_frames;
  if (L == 0) {
    double all_blank = 0;
    for (int t = 0; t < pg.frames; ++t) all_blank += SafeLog(pg.Prob(t, blank));
    return std::max(all_blank, kLogZero);
  }
  if (min_frames > pg.frames) return kLogZero;

  auto sym_of = [&](int s) { return s % 2 == 0 ? blank : chars[(s - 1) / 2]; };

  std::vector<double> alpha(S, kLogZero), next(S, kLogZero);
  alpha[0] = SafeLog(pg.Prob(0, blank));
  alpha[1] = SafeLog(pg.Prob(0, chars[0]));
  for (int t = 1; t < pg.frames; ++t) {
    for (int s = 0; s < S; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = LogAdd(acc, alpha[s - 1]);
      if (s >= 2 && s % 2 == 1 && chars[(s - 1) / 2] != chars[(s - 3) / 2])
        acc = LogAdd(acc, alpha[s - 2]);
      next[s] = IsLogZero(acc) ? kLogZero : acc + SafeLog(pg.Prob(t, sym_of(s)));
    }
    std::swap(alpha, next);
  }
  double total = LogAdd(alpha[S - 1], alpha[S - 2]);
  return IsLogZero(total) ? kLogZero : total;
}

std::string BestPathDecode(const Posteriorgram& pg) {
  ValidatePosteriorgram(pg);
  const size_t stride = pg.alphabet.size() + 1;
  std::vector<int> path(pg.frames);
  for (int t = 0; t < pg.frames; ++t) {
    int best = 0;
    for (size_t s = 1; s < stride; ++s)
      if (pg.data[t * stride + s] > pg.data[t * stride + best])
        best = static_cast<int>(s);
    path[t] = best;
  }
  return CtcCollapse(path, pg.alphabet);
}

namespace {

// A token is a word-sequence hypothesis carrying CTC forward masses over
// the blank-augmented chain of its concatenated characters (2L+1 states).
// Language-model and word-penalty costs are folded in once as mass crosses
// into each word, so a token's final mass equals the forward probability
// of its concatenation times its LM/penalty weight: with an unlimited
// beam the search is exact.
struct Token {
  std::vector<int> words;          // lexicon indices
  std::vector<int> chars;          // concatenated symbol indices
  std::vector<double> entry_bonus; // per char: cost added on entering it
  std::vector<double> alpha;       // 2*chars.size()+1 states
  double best = kLogZero;          // max state mass, the pruning score
  std::vector<char> spawned;       // lexicon words already extended from here

  double ExitMass() const {
    size_t S = alpha.size();
    return LogAdd(alpha[S - 1], alpha[S - 2]);
  }
};

void UpdateToken(Token& tok, const Posteriorgram& pg, int t,
                 const std::vector<double>& log_emit) {
  const int blank = pg.blank_index();
  const int S = static_cast<int>(tok.alpha.size());
  static thread_local std::vector<double> next;
  next.assign(S, kLogZero);
  double best = kLogZero;
  for (int s = 0; s < S; ++s) {
    double acc;
    int sym;
    if (s % 2 == 0) {  // blank state
      acc = tok.alpha[s];
      if (s >= 1) acc = LogAdd(acc, tok.alpha[s - 1]);
      sym = blank;
    } else {
      int j = (s - 1) / 2;
      double enter = tok.alpha[s - 1];
      if (s >= 3 && tok.chars[j] != tok.chars[j - 1])
        enter = LogAdd(enter, tok.alpha[s - 2]);
      acc = LogAdd(tok.alpha[s], enter + tok.entry_bonus[j]);
      sym = tok.chars[j];
    }
    double v = IsLogZero(acc) ? kLogZero : acc + log_emit[sym];
    next[s] = v;
    best = std::max(best, v);
  }
  tok.alpha.swap(next);
  tok.best = best;
}

bool WordsLess(const std::vector<int>& a, const std::vector<int>& b,
               const Lexicon& lex) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return lex.word(a[i]) < lex.word(b[i]);
  return a.size() < b.size();
}

}  // namespace

Hypothesis TokenPassingDecode(const Posteriorgram& pg, const Lexicon& lexicon,
                              const BigramLM* lm, const DecodeParams& params) {
  ValidatePosteriorgram(pg);
  if (lexicon.empty()) throw Error("TokenPassingDecode: empty lexicon");
  if (params.lm_scale != 0 && lm == nullptr)
    throw Error("TokenPassingDecode: lm_scale != 0 requires a language model");
  if (params.lm_scale < 0)
    throw Error("TokenPassingDecode: lm_scale must be >= 0");

  const int blank = pg.blank_index();
  const size_t n_words = lexicon.size();
  const size_t beam = params.beam <= 0 ? SIZE_MAX : static_cast<size_t>(params.beam);

  auto lm_cost = [&](const std::string& prev, size_t w) {
    double delta = params.word_penalty;
    if (params.lm_scale != 0)
      delta += params.lm_scale * lm->LogProb(prev, lexicon.word(w));
    return delta;
  };

  std::vector<Token> live;
  double log_blank_prefix = 0;  // sum of log blank probs over frames so far
  std::vector<double> log_emit(pg.alphabet.size() + 1);

  for (int t = 0; t < pg.frames; ++t) {
    for (size_t s = 0; s < log_emit.size(); ++s)
      log_emit[s] = SafeLog(pg.Prob(t, static_cast<int>(s)));

    for (auto& tok : live) UpdateToken(tok, pg, t, log_emit);

    // Root tokens: single-word hypotheses entered via an all-blank prefix.
    // At t = 0 this is the standard CTC initialization; a root that was
    // pruned earlier can re-enter through the blank prefix.
    std::vector<char> root_alive(n_words, 0);
    for (const auto& tok : live)
      if (tok.words.size() == 1) root_alive[tok.words[0]] = 1;
    for (size_t w = 0; w < n_words; ++w) {
      if (root_alive[w]) continue;
      double delta = lm_cost(kSentenceStart, w);
      const auto& chars = lexicon.chars(w);
      Token tok;
      tok.words = {static_cast<int>(w)};
      tok.chars = chars;
      tok.entry_bonus.assign(chars.size(), 0.0);
      tok.alpha.assign(2 * chars.size() + 1, kLogZero);
      tok.alpha[0] = delta + log_blank_prefix + log_emit[blank];
      double enter = t == 0 ? 0.0 : log_blank_prefix;
      tok.alpha[1] = delta + enter + log_emit[chars[0]];
      tok.best = std::max(tok.alpha[0], tok.alpha[1]);
      tok.spawned.assign(n_words, 0);
      if (!IsLogZero(tok.best)) live.push_back(std::move(tok));
    }
    log_blank_prefix += log_emit[blank];

    // Extension candidates: tokens whose last word can have completed by
    // this frame propose one child per lexicon word. Only candidates that
    // would fit the beam are materialized; the rest retry while the parent
    // survives. With an unlimited beam every candidate materializes at the
    // first feasible frame, which keeps the search exact.
    struct Cand {
      size_t parent;
      size_t word;
      double delta;
      double est;  // crossing mass estimate used for candidate ranking
    };
    std::vector<Cand> cands;
    size_t n_live = live.size();
    for (size_t i = 0; i < n_live; ++i) {
      double exit_mass = live[i].ExitMass();
      if (IsLogZero(exit_mass)) continue;
      const std::string& last = lexicon.word(live[i].words.back());
      for (size_t w = 0; w < n_words; ++w) {
        if (live[i].spawned[w]) continue;
        double delta = lm_cost(last, w);
        cands.push_back({i, w, delta, exit_mass + delta});
      }
    }
    if (cands.size() > beam) {
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.est != b.est) return a.est > b.est;
        if (a.parent != b.parent) return a.parent < b.parent;
        return a.word < b.word;
      });
      cands.resize(beam);
    }
    for (const Cand& c : cands) {
      live[c.parent].spawned[c.word] = 1;
      const Token& parent = live[c.parent];
      Token child;
      child.words = parent.words;
      child.words.push_back(static_cast<int>(c.word));
      child.chars = parent.chars;
      child.entry_bonus = parent.entry_bonus;
      child.alpha = parent.alpha;
      const auto& chars = lexicon.chars(c.word);
      for (size_t j = 0; j < chars.size(); ++j) {
        child.chars.push_back(chars[j]);
        child.entry_bonus.push_back(j == 0 ? c.delta : 0.0);
        child.alpha.push_back(kLogZero);
        child.alpha.push_back(kLogZero);
      }
      child.best = c.est;  // refreshed at its first update
      child.spawned.assign(n_words, 0);
      live.push_back(std::move(child));
    }

    if (live.size() > beam) {
      std::stable_sort(live.begin(), live.end(),
                       [&](const Token& a, const Token& b) {
                         if (a.best != b.best) return a.best > b.best;
                         return WordsLess(a.words, b.words, lexicon);
                       });
      live.resize(beam);
    }
  }

  // Pick the completed hypothesis with the highest final mass.
  int winner = -1;
  double winner_score = kLogZero;
  for (size_t i = 0; i < live.size(); ++i) {
    double score = live[i].ExitMass();
    if (IsLogZero(score)) continue;
    if (winner < 0 || score > winner_score ||
        (score == winner_score &&
         WordsLess(live[i].words, live[winner].words, lexicon))) {
      winner = static_cast<int>(i);
      winner_score = score;
    }
  }
  if (winner < 0) return Hypothesis{{}, kLogZero, {}};

  Hypothesis hyp;
  for (int w : live[winner].words) hyp.words.push_back(lexicon.word(w));
  hyp.total_score = winner_score;

  // Confidence per word: two-way softmax between the winner and the best
  // surviving hypothesis that disagrees at that position.
  for (size_t pos = 0; pos < live[winner].words.size(); ++pos) {
    double best_other = kLogZero;
    for (size_t i = 0; i < live.size(); ++i) {
      if (static_cast<int>(i) == winner) continue;
      bool same = pos < live[i].words.size() &&
                  live[i].words[pos] == live[winner].words[pos];
      if (same) continue;
      best_other = std::max(best_other, live[i].ExitMass());
    }
    double conf = IsLogZero(best_other)
                      ? 1.0
                      : 1.0 / (1.0 + std::exp(best_other - winner_score));
    hyp.word_confidences.push_back(std::clamp(conf, 0.0, 1.0));
  }
  return hyp;
}

}  // namespace htr
