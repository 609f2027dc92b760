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

#include <algorithm>
#include <cmath>

#include "spot/error.hpp"
#include "spot/visual_features.hpp"

namespace spot {

namespace {

constexpr float kTwoPi = 6.28318530717958647692f;

struct GradientField {
  std::vector<float> magnitude;
  std::vector<float> orientation;  // [0, 2pi)
};

// Central differences on interior pixels; border rows/cols stay zero. Patches
// never touch the border (margin >= half patch), so the border values are
// never read by a descriptor.
GradientField compute_gradients(const GrayImage& img) {
  GradientField g;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  g.magnitude.assign(n, 0.f);
  g.orientation.assign(n, 0.f);
  for (int y = 1; y + 1 < img.height; ++y) {
    for (int x = 1; x + 1 < img.width; ++x) {
      const float gx = 0.5f * (img.at(x + 1, y) - img.at(x - 1, y));
      const float gy = 0.5f * (img.at(x, y + 1) - img.at(x, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      g.magnitude[i] = std::sqrt(gx * gx + gy * gy);
      float a = std::atan2(gy, gx);
      if (a < 0) a += kTwoPi;
      g.orientation[i] = a;
    }
  }
  return g;
}

// 4x4 spatial cells x 8 orientation bins over an s x s patch centered at
// (cx, cy). Hard spatial binning, magnitude-weighted orientation votes,
// L2 normalize, clamp at 0.2, renormalize.
void describe_patch(const GradientField& g, int img_w, int cx, int cy, int s,
                    float* out) {
  std::fill(out, out + kDescriptorDim, 0.f);
  const int x0 = cx - s / 2;
  const int y0 = cy - s / 2;
  const int cell = s / 4;
  for (int dy = 0; dy < s; ++dy) {
    const int ry = std::min(dy / cell, 3);
    for (int dx = 0; dx < s; ++dx) {
      const std::size_t i =
          static_cast<std::size_t>(y0 + dy) * img_w + (x0 + dx);
      const float m = g.magnitude[i];
      if (m <= 0.f) continue;
      const int rx = std::min(dx / cell, 3);
      int ob = static_cast<int>(g.orientation[i] * (8.f / kTwoPi));
      if (ob > 7) ob = 7;
      out[(ry * 4 + rx) * 8 + ob] += m;
    }
  }
  float norm2 = 0.f;
  for (int i = 0; i < kDescriptorDim; ++i) norm2 += out[i] * out[i];
  if (norm2 < 1e-20f) {
    std::fill(out, out + kDescriptorDim, 0.f);
    return;
  }
  float inv = 1.f / std::sqrt(norm2);
  for (int i = 0; i < kDescriptorDim; ++i)
    out[i] = std::min(out[i] * inv, 0.2f);
  norm2 = 0.f;
  for (int i = 0; i < kDescriptorDim; ++i) norm2 += out[i] * out[i];
  inv = norm2 > 0.f ? 1.f / std::sqrt(norm2) : 0.f;
  for (int i = 0; i < kDescriptorDim; ++i) out[i] *= inv;
}

}  // namespace

DenseDescriptorSet extract_dense_descriptors(const GrayImage& image, int step,
                                             const std::vector<int>& scales,
                                             Exec exec) {
  if (image.empty()) fail(Err::ImageTooSmall, "empty image");
  if (step < 1) fail(Err::Usage, "descriptor step must be >= 1");
  if (scales.empty()) fail(Err::Usage, "at least one scale required");
  for (int s : scales)
    if (s < 4 || s % 4 != 0)
      fail(Err::Usage, "patch width must be a positive multiple of 4");

  DenseDescriptorSet out;
  out.image_width = image.width;
  out.image_height = image.height;

  for (int s : scales) {
    const int m = s / 2;  // boundary margin: the patch fits entirely
    if (image.width < s || image.height < s) continue;
    for (int cy = m; cy <= image.height - m; cy += step)
      for (int cx = m; cx <= image.width - m; cx += step)
        out.keypoints.push_back({static_cast<float>(cx),
                                 static_cast<float>(cy),
                                 static_cast<float>(s)});
  }
  if (out.keypoints.empty())
    fail(Err::ImageTooSmall,
         "image " + std::to_string(image.width) + "x" +
             std::to_string(image.height) + " smaller than the smallest patch");

  const GradientField grads = compute_gradients(image);
  out.vectors.resize(static_cast<Eigen::Index>(out.keypoints.size()),
                     kDescriptorDim);

  parallel_for(static_cast<std::int64_t>(out.keypoints.size()), exec,
               [&](std::int64_t i) {
                 const KeyPoint& kp = out.keypoints[static_cast<std::size_t>(i)];
                 describe_patch(grads, image.width, static_cast<int>(kp.x),
                                static_cast<int>(kp.y), static_cast<int>(kp.scale),
                                out.vectors.row(i).data());
               });
  return out;
}

}  // namespace spot
