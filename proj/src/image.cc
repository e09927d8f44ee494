// src/image.cc

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

#include "htr/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "htr/common.h"

namespace htr {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
bool NextHeaderToken(const std::string& bytes, size_t& pos, std::string& tok) {
  while (pos < bytes.size()) {
    char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
  size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])))
    ++pos;
  tok = bytes.substr(start, pos - start);
  return !tok.empty();
}

int ParseHeaderInt(const std::string& tok, const std::string& what,
                   const std::string& origin) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw Error(origin + ": malformed PGM header (" + what + " = '" + tok + "')");
  long v = std::stol(tok);
  if (v <= 0 || v > 1 << 24)
    throw Error(origin + ": malformed PGM header (" + what + " out of range)");
  return static_cast<int>(v);
}

}  // namespace

GrayImage DecodePgm(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < 2 || bytes[0] != 'P')
    throw Error(origin + ": not a PGM file (missing magic)");
  if (bytes[1] != '5') {
    std::string magic = bytes.substr(0, 2);
    throw Error(origin + ": unsupported magic '" + magic + "' (want P5)");
  }
  size_t pos = 2;
  std::string wtok, htok, mtok;
  if (!NextHeaderToken(bytes, pos, wtok) || !NextHeaderToken(bytes, pos, htok) ||
      !NextHeaderToken(bytes, pos, mtok))
    throw Error(origin + ": malformed PGM header (truncated)");
  int w = ParseHeaderInt(wtok, "width", origin);
  int h = ParseHeaderInt(htok, "height", origin);
  if (mtok != "255")
    throw Error(origin + ": unsupported maxval " + mtok + " (want 255)");
  // Exactly one whitespace byte separates header from payload.
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw Error(origin + ": malformed PGM header (missing payload separator)");
  ++pos;
  size_t need = static_cast<size_t>(w) * h;
  if (bytes.size() - pos < need)
    throw Error(origin + ": truncated PGM payload (have " +
                std::to_string(bytes.size() - pos) + " bytes, need " +
                std::to_string(need) + ")");
  GrayImage img(w, h);
  std::memcpy(img.pixels.data(), bytes.data() + pos, need);
  return img;
}

std::string EncodePgm(const GrayImage& img) {
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != static_cast<size_t>(img.width) * img.height)
    throw Error("EncodePgm: image dimensions inconsistent with pixel count");
  std::string out = "P5\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()),
             img.pixels.size());
  return out;
}

GrayImage ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return DecodePgm(ss.str(), path);
}

void WritePgm(const GrayImage& img, const std::string& path) {
  std::string bytes = EncodePgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open file for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(path + ": write failed");
}

GrayImage ResampleBilinear(const GrayImage& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw Error("ResampleBilinear: target dimensions must be >= 1");
  if (img.width < 1 || img.height < 1)
    throw Error("ResampleBilinear: source image is empty");
  if (new_width == img.width && new_height == img.height) return img;

  GrayImage out(new_width, new_height);
  double sx = static_cast<double>(img.width) / new_width;
  double sy = static_cast<double>(img.height) / new_height;
  for (int oy = 0; oy < new_height; ++oy) {
    double fy = (oy + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y1 = y0 + 1;
    y0 = std::clamp(y0, 0, img.height - 1);
    y1 = std::clamp(y1, 0, img.height - 1);
    for (int ox = 0; ox < new_width; ++ox) {
      double fx = (ox + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x1 = x0 + 1;
      x0 = std::clamp(x0, 0, img.width - 1);
      x1 = std::clamp(x1, 0, img.width - 1);
      double v = (1 - wy) * ((1 - wx) * img.At(x0, y0) + wx * img.At(x1, y0)) +
                 wy * ((1 - wx) * img.At(x0, y1) + wx * img.At(x1, y1));
      out.At(ox, oy) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return out;
}

}  // namespace htr
