// src/scale.cc

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

#include "htr/scale.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "htr/common.h"

namespace htr {

int ScaleScore(const GrayImage& line, int binarize_threshold) {
  std::vector<int> row_ink(line.height, 0);
  int max_ink = 0;
  for (int y = 0; y < line.height; ++y) {
    int count = 0;
    for (int x = 0; x < line.width; ++x)
      if (line.At(x, y) < binarize_threshold) ++count;
    row_ink[y] = count;
    max_ink = std::max(max_ink, count);
  }
  if (max_ink == 0) throw Error("ScaleScore: no ink");
  // Core band: longest contiguous run of rows at >= half the peak density.
  int best = 0, run = 0;
  for (int y = 0; y < line.height; ++y) {
    if (row_ink[y] >= 0.5 * max_ink) {
      ++run;
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best;
}

namespace {

// Within-class sum of squared deviations for sorted[a..b], via prefix sums.
struct SsdTable {
  std::vector<double> sum, sumsq;
  explicit SsdTable(const std::vector<double>& sorted)
      : sum(sorted.size() + 1, 0), sumsq(sorted.size() + 1, 0) {
    for (size_t i = 0; i < sorted.size(); ++i) {
      sum[i + 1] = sum[i] + sorted[i];
      sumsq[i + 1] = sumsq[i] + sorted[i] * sorted[i];
    }
  }
  double operator()(int a, int b) const {  // inclusive indices
    double s = sum[b + 1] - sum[a];
    double sq = sumsq[b + 1] - sumsq[a];
    double n = b - a + 1;
    return std::max(0.0, sq - s * s / n);
  }
};

}  // namespace

ScaleClassification JenksClassify(const std::vector<double>& scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 1) throw Error("JenksClassify: k must be >= 1");
  if (n < k)
    throw Error("JenksClassify: fewer values (" + std::to_string(n) +
                ") than classes (" + std::to_string(k) + ")");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> sorted(n);
  for (int i = 0; i < n; ++i) sorted[i] = scores[order[i]];
  SsdTable ssd(sorted);

  // S[j][i]: optimal cost of splitting sorted[i..n-1] into j classes;
  // choice[j][i]: the largest end index of the first class among
  // minimizers, so ties resolve to the latest feasible breaks.
  std::vector<std::vector<double>> S(k + 1, std::vector<double>(n + 1, 0));
  std::vector<std::vector<int>> choice(k + 1, std::vector<int>(n + 1, -1));
  for (int i = 0; i < n; ++i) S[1][i] = ssd(i, n - 1);
  for (int j = 2; j <= k; ++j) {
    for (int i = 0; i + j <= n; ++i) {
      double best = 0;
      int best_t = -1;
      for (int t = i; t <= n - j; ++t) {
        double cost = ssd(i, t) + S[j - 1][t + 1];
        if (best_t < 0 || cost <= best) {
          best = cost;
          best_t = t;
        }
      }
      S[j][i] = best;
      choice[j][i] = best_t;
    }
  }

  // Recover class boundaries in sorted order.
  std::vector<int> class_of_sorted(n, 0);
  int pos = 0;
  std::vector<int> starts;  // start index of each class
  for (int c = 0, remaining = k; c < k; ++c, --remaining) {
    starts.push_back(pos);
    int end = remaining == 1 ? n - 1 : choice[remaining][pos];
    for (int i = pos; i <= end; ++i) class_of_sorted[i] = c;
    pos = end + 1;
  }

  ScaleClassification out;
  out.scores = scores;
  out.labels.assign(n, 0);
  for (int i = 0; i < n; ++i) out.labels[order[i]] = class_of_sorted[i];
  for (int c = 1; c < k; ++c) out.breaks.push_back(sorted[starts[c]]);
  out.class_means.assign(k, 0);
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    out.class_means[out.labels[i]] += scores[i];
    counts[out.labels[i]] += 1;
  }
  for (int c = 0; c < k; ++c) out.class_means[c] /= counts[c];
  return out;
}

double JenksObjective(const std::vector<double>& scores,
                      const std::vector<int>& labels, int k) {
  if (scores.size() != labels.size())
    throw Error("JenksObjective: size mismatch");
  std::vector<double> sum(k, 0), sumsq(k, 0);
  std::vector<int> count(k, 0);
  for (size_t i = 0; i < scores.size(); ++i) {
    int c = labels[i];
    if (c < 0 || c >= k) throw Error("JenksObjective: label out of range");
    sum[c] += scores[i];
    sumsq[c] += scores[i] * scores[i];
    count[c] += 1;
  }
  double total = 0;
  for (int c = 0; c < k; ++c)
    if (count[c] > 0) total += sumsq[c] - sum[c] * sum[c] / count[c];
  return total;
}

AugmentationPlan PlanAugmentation(const ScaleClassification& cls) {
  const int k = static_cast<int>(cls.class_means.size());
  std::vector<int> counts(k, 0);
  for (int label : cls.labels) counts[label] += 1;
  for (int c = 0; c < k; ++c)
    if (counts[c] == 0)
      throw Error("PlanAugmentation: class " + std::to_string(c) +
                  " is empty, scaling factors undefined");
  AugmentationPlan plan;
  for (size_t i = 0; i < cls.labels.size(); ++i) {
    int source = cls.labels[i];
    for (int target = 0; target < k; ++target) {
      if (target == source) continue;
      plan.items.push_back({static_cast<int>(i), source, target,
                            cls.class_means[target] / cls.class_means[source]});
    }
  }
  return plan;
}

GrayImage RescaleInk(const GrayImage& line, double factor, RescaleMode mode) {
  if (!(factor > 0)) throw Error("RescaleInk: factor must be positive");
  if (factor == 1.0) return line;

  int new_height = static_cast<int>(std::lround(line.height * factor));
  if (new_height < 1)
    throw Error("RescaleInk: result height below 1 pixel");

  if (mode == RescaleMode::kFree) {
    int new_width = static_cast<int>(std::lround(line.width * factor));
    if (new_width < 1)
      throw Error("RescaleInk: result width below 1 pixel");
    return ResampleBilinear(line, new_width, new_height);
  }

  // Canvas-preserving: scale vertically, then recenter on the original
  // height, padding with background or cropping the overflow.
  GrayImage scaled = ResampleBilinear(line, line.width, new_height);
  GrayImage out(line.width, line.height, 255);
  if (new_height <= line.height) {
    int top = (line.height - new_height) / 2;
    for (int y = 0; y < new_height; ++y)
      for (int x = 0; x < line.width; ++x)
        out.At(x, top + y) = scaled.At(x, y);
  } else {
    int src_top = (new_height - line.height) / 2;
    for (int y = 0; y < line.height; ++y)
      for (int x = 0; x < line.width; ++x)
        out.At(x, y) = scaled.At(x, src_top + y);
  }
  return out;
}

}  // namespace htr
