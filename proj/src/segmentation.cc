// src/segmentation.cc

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

#include "htr/segmentation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "htr/common.h"

namespace htr {

ComponentExtraction ExtractComponents(const GrayImage& page,
                                      int binarize_threshold, int min_area) {
  if (binarize_threshold < 0 || binarize_threshold > 255)
    throw Error("ExtractComponents: threshold must be in [0,255]");
  const int w = page.width, h = page.height;
  ComponentExtraction out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<size_t>(w) * h, -1);

  auto is_ink = [&](int x, int y) {
    return page.At(x, y) < binarize_threshold;
  };

  // Flood fill with an explicit stack; 8-connectivity.
  std::vector<int32_t> raw(out.labels.size(), -1);
  struct Blob {
    long long sum_x = 0, sum_y = 0;
    int count = 0;
    int min_x = 1 << 30, min_y = 1 << 30, max_x = -1, max_y = -1;
  };
  std::vector<Blob> blobs;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!is_ink(x, y) || raw[static_cast<size_t>(y) * w + x] != -1) continue;
      int32_t id = static_cast<int32_t>(blobs.size());
      blobs.emplace_back();
      stack.clear();
      stack.emplace_back(x, y);
      raw[static_cast<size_t>(y) * w + x] = id;
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        Blob& b = blobs[id];
        b.sum_x += px;
        b.sum_y += py;
        b.count += 1;
        b.min_x = std::min(b.min_x, px);
        b.min_y = std::min(b.min_y, py);
        b.max_x = std::max(b.max_x, px);
        b.max_y = std::max(b.max_y, py);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int nx = px + dx, ny = py + dy;
            if (!page.InBounds(nx, ny) || !is_ink(nx, ny)) continue;
            size_t idx = static_cast<size_t>(ny) * w + nx;
            if (raw[idx] != -1) continue;
            raw[idx] = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }

  // Keep blobs meeting the area floor; order by (cy, cx).
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(blobs.size()); ++i)
    if (blobs[i].count >= min_area) keep.push_back(i);
  std::vector<Component> comps;
  comps.reserve(keep.size());
  for (int i : keep) {
    const Blob& b = blobs[i];
    Component c;
    c.bbox = {b.min_x, b.min_y, b.max_x - b.min_x + 1, b.max_y - b.min_y + 1};
    c.cx = static_cast<double>(b.sum_x) / b.count;
    c.cy = static_cast<double>(b.sum_y) / b.count;
    c.ink_count = b.count;
    comps.push_back(c);
  }
  std::vector<size_t> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (comps[a].cy != comps[b].cy) return comps[a].cy < comps[b].cy;
    return comps[a].cx < comps[b].cx;
  });
  std::vector<int32_t> remap(blobs.size(), -1);
  for (size_t rank = 0; rank < order.size(); ++rank) {
    out.components.push_back(comps[order[rank]]);
    remap[keep[order[rank]]] = static_cast<int32_t>(rank);
  }
  for (size_t i = 0; i < raw.size(); ++i)
    if (raw[i] != -1) out.labels[i] = remap[raw[i]];
  return out;
}

BaselineSet DetectBaselines(const std::vector<Component>& components,
                            double smoothing_sigma) {
  if (components.empty()) throw Error("DetectBaselines: no components");

  int max_bottom = 0;
  for (const auto& c : components)
    max_bottom = std::max(max_bottom, c.bbox.y + c.bbox.h - 1);
  std::vector<double> hist(max_bottom + 1, 0.0);
  for (const auto& c : components) hist[c.bbox.y + c.bbox.h - 1] += 1.0;

  // Gaussian smoothing, truncated at 3 sigma.
  std::vector<double> smooth(hist.size(), 0.0);
  if (smoothing_sigma > 0) {
    int radius = std::max(1, static_cast<int>(std::ceil(3 * smoothing_sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double norm = 0;
    for (int k = -radius; k <= radius; ++k) {
      kernel[k + radius] = std::exp(-0.5 * k * k / (smoothing_sigma * smoothing_sigma));
      norm += kernel[k + radius];
    }
    for (auto& v : kernel) v /= norm;
    for (int y = 0; y < static_cast<int>(hist.size()); ++y) {
      if (hist[y] == 0) continue;
      for (int k = -radius; k <= radius; ++k) {
        int yy = y + k;
        if (yy >= 0 && yy < static_cast<int>(smooth.size()))
          smooth[yy] += hist[y] * kernel[k + radius];
      }
    }
  } else {
    smooth = hist;
  }

  // Local maxima; out-of-range neighbors count as 0, plateaus keep their
  // leading edge.
  std::vector<int> peaks;
  for (int y = 0; y < static_cast<int>(smooth.size()); ++y) {
    if (smooth[y] <= 0) continue;
    double left = y > 0 ? smooth[y - 1] : 0.0;
    double right = y + 1 < static_cast<int>(smooth.size()) ? smooth[y + 1] : 0.0;
    if (smooth[y] >= left && smooth[y] > right) peaks.push_back(y);
  }
  if (peaks.empty()) {
    // Degenerate flat profile; fall back to the tallest bin.
    peaks.push_back(static_cast<int>(
        std::max_element(smooth.begin(), smooth.end()) - smooth.begin()));
  }

  // Merge peaks closer than half the median gap, keeping the taller.
  if (peaks.size() >= 2) {
    std::vector<double> gaps;
    for (size_t i = 1; i < peaks.size(); ++i)
      gaps.push_back(static_cast<double>(peaks[i] - peaks[i - 1]));
    std::vector<double> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    double median_gap = sorted_gaps[sorted_gaps.size() / 2];
    if (sorted_gaps.size() % 2 == 0)
      median_gap = 0.5 * (sorted_gaps[sorted_gaps.size() / 2 - 1] + median_gap);
    std::vector<int> merged;
    for (int p : peaks) {
      if (!merged.empty() && p - merged.back() < 0.5 * median_gap) {
        if (smooth[p] > smooth[merged.back()]) merged.back() = p;
      } else {
        merged.push_back(p);
      }
    }
    peaks = std::move(merged);
  }

  BaselineSet set;
  for (int p : peaks) set.baselines.push_back(static_cast<double>(p));
  if (set.baselines.size() >= 2) {
    double total = set.baselines.back() - set.baselines.front();
    set.mean_gap = total / static_cast<double>(set.baselines.size() - 1);
  }
  return set;
}

std::vector<int> AssignComponents(const std::vector<Component>& components,
                                  const BaselineSet& baselines) {
  if (baselines.baselines.empty())
    throw Error("AssignComponents: no baselines");
  const auto& lines = baselines.baselines;
  std::vector<int> assignment(components.size(), 0);
  for (size_t i = 0; i < components.size(); ++i) {
    double cy = components[i].cy;
    int best = 0;
    double best_dist = std::abs(cy - lines[0]);
    for (size_t b = 1; b < lines.size(); ++b) {
      double d = std::abs(cy - lines[b]);
      if (d <= best_dist) {  // <= breaks ties toward the larger-y baseline
        best_dist = d;
        best = static_cast<int>(b);
      }
    }
    if (baselines.mean_gap > 0 && best_dist > 0.75 * baselines.mean_gap) {
      // Detached mark (e.g. a diacritic): take the nearest baseline below
      // the center; if none exists, keep the nearest.
      for (size_t b = 0; b < lines.size(); ++b) {
        if (lines[b] >= cy) {
          best = static_cast<int>(b);
          break;
        }
      }
    }
    assignment[i] = best;
  }
  return assignment;
}

std::vector<SegmentedLine> ExtractLines(const GrayImage& page,
                                        const ComponentExtraction& extraction,
                                        const std::vector<int>& assignment,
                                        const BaselineSet& baselines,
                                        const std::string& page_id,
                                        int bbox_pad) {
  const auto& comps = extraction.components;
  if (assignment.size() != comps.size())
    throw Error("ExtractLines: assignment size mismatch");
  size_t n_baselines = baselines.baselines.size();

  struct Group {
    std::vector<int> members;
    Box bbox;
  };
  std::vector<Group> groups(n_baselines);
  for (size_t i = 0; i < comps.size(); ++i) {
    int b = assignment[i];
    if (b < 0 || b >= static_cast<int>(n_baselines))
      throw Error("ExtractLines: assignment index out of range");
    Group& g = groups[b];
    const Box& cb = comps[i].bbox;
    if (g.members.empty()) {
      g.bbox = cb;
    } else {
      int x1 = std::min(g.bbox.x, cb.x);
      int y1 = std::min(g.bbox.y, cb.y);
      int x2 = std::max(g.bbox.x + g.bbox.w, cb.x + cb.w);
      int y2 = std::max(g.bbox.y + g.bbox.h, cb.y + cb.h);
      g.bbox = {x1, y1, x2 - x1, y2 - y1};
    }
    g.members.push_back(static_cast<int>(i));
  }

  // Baselines with members, ordered by the vertical center of their boxes.
  std::vector<int> with_members;
  for (size_t b = 0; b < n_baselines; ++b)
    if (!groups[b].members.empty()) with_members.push_back(static_cast<int>(b));
  std::stable_sort(with_members.begin(), with_members.end(), [&](int a, int b) {
    double ca = groups[a].bbox.y + groups[a].bbox.h / 2.0;
    double cb = groups[b].bbox.y + groups[b].bbox.h / 2.0;
    return ca < cb;
  });

  std::vector<SegmentedLine> out;
  int line_index = 0;
  for (int b : with_members) {
    Group& g = groups[b];
    int x1 = std::max(0, g.bbox.x - bbox_pad);
    int y1 = std::max(0, g.bbox.y - bbox_pad);
    int x2 = std::min(page.width, g.bbox.x + g.bbox.w + bbox_pad);
    int y2 = std::min(page.height, g.bbox.y + g.bbox.h + bbox_pad);
    Box bbox = {x1, y1, x2 - x1, y2 - y1};

    GrayImage strip(bbox.w, bbox.h, 255);
    std::vector<char> mine(comps.size(), 0);
    for (int m : g.members) mine[m] = 1;
    for (int y = y1; y < y2; ++y) {
      for (int x = x1; x < x2; ++x) {
        int32_t label = extraction.labels[static_cast<size_t>(y) * page.width + x];
        if (label >= 0 && mine[label])
          strip.At(x - x1, y - y1) = page.At(x, y);
      }
    }

    SegmentedLine line;
    line.record.page_id = page_id;
    line.record.line_index = line_index++;
    line.record.bbox = bbox;
    line.record.status = LineStatus::kAuto;
    line.image = std::move(strip);
    out.push_back(std::move(line));
  }
  return out;
}

GrayImage NormalizeHeight(const GrayImage& line, int target_height) {
  if (line.height < 1 || line.width < 1)
    throw Error("NormalizeHeight: empty image");
  if (target_height < 1)
    throw Error("NormalizeHeight: target height must be >= 1");
  if (line.height == target_height) return line;
  double scale = static_cast<double>(target_height) / line.height;
  int new_width = std::max(1, static_cast<int>(std::lround(line.width * scale)));
  return ResampleBilinear(line, new_width, target_height);
}

std::vector<SegmentedLine> SegmentPage(const GrayImage& page,
                                       const std::string& page_id,
                                       const SegmentationParams& params) {
  ComponentExtraction extraction = ExtractComponents(
      page, params.binarize_threshold, params.min_component_area);
  if (extraction.components.empty()) return {};
  BaselineSet baselines =
      DetectBaselines(extraction.components, params.smoothing_sigma);
  std::vector<int> assignment =
      AssignComponents(extraction.components, baselines);
  return ExtractLines(page, extraction, assignment, baselines, page_id,
                      params.bbox_pad);
}

}  // namespace htr
