// Copyright 2026 The spot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spot {

/// Axis-aligned pixel rectangle, (x, y) top-left, width/height in px.
struct PixelBox {
  int x = 0, y = 0, w = 0, h = 0;
  long long area() const { return static_cast<long long>(w) * h; }
  int x2() const { return x + w; }  // exclusive
  int y2() const { return y + h; }  // exclusive
  bool operator==(const PixelBox&) const = default;
};

PixelBox box_union(const PixelBox& a, const PixelBox& b);
PixelBox box_intersection(const PixelBox& a, const PixelBox& b);  // w,h 0 if disjoint
PixelBox clip_box(const PixelBox& b, int page_w, int page_h);

/// Grayscale raster, row-major float intensities in [0, 1].
struct GrayImage {
  int width = 0, height = 0;
  std::vector<float> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.f)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool empty() const { return width <= 0 || height <= 0; }
};

GrayImage crop(const GrayImage& img, const PixelBox& box);

// 8-bit binary PGM (P5) round trip; intensities quantized to 0..255.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

struct BinaryImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> fg;  // 1 = foreground (ink)

  std::uint8_t at(int x, int y) const {
    return fg[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return fg[static_cast<std::size_t>(y) * width + x];
  }
};

}  // namespace spot
