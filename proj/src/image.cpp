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

#include "spot/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "spot/error.hpp"

namespace spot {

PixelBox box_union(const PixelBox& a, const PixelBox& b) {
  if (a.w <= 0 || a.h <= 0) return b;
  if (b.w <= 0 || b.h <= 0) return a;
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x2(), b.x2());
  const int y1 = std::max(a.y2(), b.y2());
  return {x0, y0, x1 - x0, y1 - y0};
}

PixelBox box_intersection(const PixelBox& a, const PixelBox& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x2(), b.x2());
  const int y1 = std::min(a.y2(), b.y2());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

PixelBox clip_box(const PixelBox& b, int page_w, int page_h) {
  return box_intersection(b, PixelBox{0, 0, page_w, page_h});
}

GrayImage crop(const GrayImage& img, const PixelBox& box) {
  const PixelBox c = clip_box(box, img.width, img.height);
  GrayImage out(c.w, c.h);
  for (int y = 0; y < c.h; ++y)
    for (int x = 0; x < c.w; ++x) out.at(x, y) = img.at(c.x + x, c.y + y);
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(Err::Io, "cannot open for writing: " + path.string());
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const float v = std::clamp(img.at(x, y), 0.f, 1.f);
      row[static_cast<std::size_t>(x)] =
          static_cast<std::uint8_t>(std::lround(v * 255.f));
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
  }
  if (!f) fail(Err::Io, "write failed: " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Err::Io, "cannot open: " + path.string());
  std::string magic;
  f >> magic;
  if (magic != "P5") fail(Err::Io, "not a P5 PGM: " + path.string());
  auto next_token = [&f, &path]() -> long {
    // skip whitespace and '#' comment lines
    while (true) {
      const int c = f.peek();
      if (c == '#') {
        std::string line;
        std::getline(f, line);
      } else if (std::isspace(c)) {
        f.get();
      } else {
        break;
      }
    }
    long v = -1;
    f >> v;
    if (!f) fail(Err::Io, "bad PGM header: " + path.string());
    return v;
  };
  const long w = next_token();
  const long h = next_token();
  const long maxval = next_token();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    fail(Err::Io, "unsupported PGM: " + path.string());
  f.get();  // single whitespace after maxval
  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
  f.read(reinterpret_cast<char*>(raw.data()),
         static_cast<std::streamsize>(raw.size()));
  if (f.gcount() != static_cast<std::streamsize>(raw.size()))
    fail(Err::Io, "truncated PGM: " + path.string());
  const float scale = 1.f / static_cast<float>(maxval);
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.pixels[i] = static_cast<float>(raw[i]) * scale;
  return img;
}

}  // namespace spot
