// include/htr/image.h

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

#ifndef HTR_IMAGE_H_
#define HTR_IMAGE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace htr {

// 8-bit grayscale raster, row-major. Convention everywhere: 0 = ink,
// 255 = background.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

  uint8_t& At(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  uint8_t At(int x, int y) const {
    return pixels[static_cast<size_t>(y) * width + x];
  }
  bool InBounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool operator==(const GrayImage& o) const = default;
};

// Binary PGM (P5), maxval 255. Canonical output header is
// "P5\n<w> <h>\n255\n" followed by width*height bytes.
GrayImage ReadPgm(const std::string& path);
void WritePgm(const GrayImage& img, const std::string& path);

// Same formats on in-memory buffers (used by the file functions).
GrayImage DecodePgm(const std::string& bytes, const std::string& origin);
std::string EncodePgm(const GrayImage& img);

// Bilinear resample to the given size (both >= 1). Shared by the height
// normalization and ink rescaling paths.
GrayImage ResampleBilinear(const GrayImage& img, int new_width, int new_height);

}  // namespace htr

#endif  // HTR_IMAGE_H_
