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

#include "spot/page_attributes.hpp"

#include <cmath>

#include "spot/binio.hpp"
#include "spot/error.hpp"

namespace spot {

namespace {
constexpr char kMapMagic[5] = {'S', 'M', 'A', 'P', '1'};
}

PageAttributeMap build_page_map(const GrayImage& page,
                                const std::string& page_id,
                                const VisualVocabulary& vocab,
                                const AttributeModel& model, int block_size,
                                const DescriptorParams& dp, Exec exec) {
  if (model.kind != EmbeddingKind::phoc)
    fail(Err::KindMismatch, "page maps use the PHOC window model");
  const BlockFvGrid grid = block_fisher_vectors(page, vocab, block_size, dp, exec);

  PageAttributeMap map;
  map.page_id = page_id;
  map.page_width = page.width;
  map.page_height = page.height;
  map.block_size = block_size;
  map.grid_w = grid.grid_w;
  map.grid_h = grid.grid_h;
  map.channels = model.subspace_dim();
  map.data.assign(static_cast<std::size_t>(map.grid_w) * map.grid_h *
                      map.channels,
                  0.f);

  parallel_for(static_cast<std::int64_t>(grid.cells.size()), exec,
               [&](std::int64_t c) {
                 const Eigen::VectorXf z =
                     embed_image(grid.cells[static_cast<std::size_t>(c)], model);
                 float* dst = map.data.data() +
                              static_cast<std::size_t>(c) * map.channels;
                 for (int ch = 0; ch < map.channels; ++ch) dst[ch] = z(ch);
               });
  return map;
}

IntegralAttributeImage build_integral(const PageAttributeMap& map, Exec exec) {
  if (map.grid_w <= 0 || map.grid_h <= 0 || map.channels <= 0)
    fail(Err::Usage, "empty page map");

  IntegralAttributeImage out;
  out.grid_w = map.grid_w;
  out.grid_h = map.grid_h;
  out.channels = map.channels;
  out.block_size = map.block_size;
  out.page_width = map.page_width;
  out.page_height = map.page_height;
  out.nodes.assign(static_cast<std::size_t>(map.grid_w + 1) *
                       (map.grid_h + 1) * map.channels,
                   0.f);

  // channels are independent; each one is a fixed row-major prefix sum
  // accumulated in double, so the result is thread-count independent
  parallel_for(map.channels, exec, [&](std::int64_t ch) {
    std::vector<double> acc(static_cast<std::size_t>(map.grid_w + 1) *
                                (map.grid_h + 1),
                            0.0);
    for (int by = 0; by < map.grid_h; ++by) {
      for (int bx = 0; bx < map.grid_w; ++bx) {
        const std::size_t node =
            static_cast<std::size_t>(by + 1) * (map.grid_w + 1) + (bx + 1);
        const std::size_t up = node - (map.grid_w + 1);
        acc[node] = static_cast<double>(map.at(bx, by)[ch]) + acc[node - 1] +
                    acc[up] - acc[up - 1];
      }
    }
    for (std::size_t n = 0; n < acc.size(); ++n)
      out.nodes[n * map.channels + static_cast<std::size_t>(ch)] =
          static_cast<float>(acc[n]);
  });
  return out;
}

Eigen::VectorXf window_sum(const IntegralAttributeImage& integral,
                           const BlockBox& box) {
  if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 ||
      box.x + box.w > integral.grid_w || box.y + box.h > integral.grid_h)
    fail(Err::OutOfBounds, "window box leaves the block grid");

  const int d = integral.channels;
  const float* br = integral.node(box.x + box.w, box.y + box.h);
  const float* bl = integral.node(box.x, box.y + box.h);
  const float* tr = integral.node(box.x + box.w, box.y);
  const float* tl = integral.node(box.x, box.y);

  Eigen::VectorXf sum(d);
  for (int ch = 0; ch < d; ++ch)
    sum(ch) = br[ch] - bl[ch] - tr[ch] + tl[ch];
  return sum;
}

Eigen::VectorXf window_embedding(const IntegralAttributeImage& integral,
                                 const BlockBox& box) {
  Eigen::VectorXf sum = window_sum(integral, box);
  const float norm = sum.norm();
  if (norm > 1e-12f) sum /= norm;
  return sum;
}

void write_page_map(const std::filesystem::path& path,
                    const PageAttributeMap& map, std::uint64_t bundle_hash) {
  BinWriter w;
  w.bytes(kMapMagic, 5);
  w.u32(1);  // version
  w.u64(bundle_hash);
  w.str(map.page_id);
  w.u32(static_cast<std::uint32_t>(map.page_width));
  w.u32(static_cast<std::uint32_t>(map.page_height));
  w.u32(static_cast<std::uint32_t>(map.block_size));
  w.u32(static_cast<std::uint32_t>(map.grid_w));
  w.u32(static_cast<std::uint32_t>(map.grid_h));
  w.u32(static_cast<std::uint32_t>(map.channels));
  for (float v : map.data) w.f32(v);
  write_file_atomic(path, w.buffer());
}

PageAttributeMap read_page_map(const std::filesystem::path& path,
                               std::uint64_t expected_bundle_hash) {
  BinReader r(read_file(path));
  char magic[5];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::string_view(magic, 5) != std::string_view(kMapMagic, 5))
    fail(Err::VersionMismatch, "not a page map file: " + path.string());
  const std::uint32_t version = r.u32();
  if (version != 1)
    fail(Err::VersionMismatch,
         "unsupported page map version " + std::to_string(version));
  const std::uint64_t hash = r.u64();
  if (expected_bundle_hash != 0 && hash != expected_bundle_hash)
    fail(Err::VersionMismatch,
         "page map was built with a different model bundle: " + path.string());

  PageAttributeMap map;
  map.page_id = r.str();
  map.page_width = static_cast<int>(r.u32());
  map.page_height = static_cast<int>(r.u32());
  map.block_size = static_cast<int>(r.u32());
  map.grid_w = static_cast<int>(r.u32());
  map.grid_h = static_cast<int>(r.u32());
  map.channels = static_cast<int>(r.u32());
  const std::size_t n =
      static_cast<std::size_t>(map.grid_w) * map.grid_h * map.channels;
  map.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) map.data[i] = r.f32();
  return map;
}

}  // namespace spot
