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

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spot/attribute_space.hpp"
#include "spot/exec.hpp"
#include "spot/image.hpp"
#include "spot/visual_features.hpp"

namespace spot {

/// Per-block common-subspace vectors of one page: block (bx, by) holds the
/// embedded attribute representation of its NxN pixel block.
struct PageAttributeMap {
  std::string page_id;
  int page_width = 0, page_height = 0;
  int block_size = 0;            // N px
  int grid_w = 0, grid_h = 0;    // ceil(w/N) x ceil(h/N)
  int channels = 0;              // d'
  std::vector<float> data;       // row-major blocks, channel-minor

  const float* at(int bx, int by) const {
    return data.data() +
           (static_cast<std::size_t>(by) * grid_w + bx) * channels;
  }
  float* at(int bx, int by) {
    return data.data() +
           (static_cast<std::size_t>(by) * grid_w + bx) * channels;
  }
};

/// 2-D prefix sums of a PageAttributeMap with a zero-padded first row and
/// column: node (i, j) holds the channel-wise sum over blocks (< i, < j).
/// Accumulated in double, stored in single precision.
struct IntegralAttributeImage {
  int grid_w = 0, grid_h = 0;  // block grid dims (nodes are +1 each axis)
  int channels = 0;
  int block_size = 0;
  int page_width = 0, page_height = 0;
  std::vector<float> nodes;

  const float* node(int i, int j) const {  // i along x, j along y
    return nodes.data() +
           (static_cast<std::size_t>(j) * (grid_w + 1) + i) * channels;
  }
};

/// Rectangle of whole blocks: (x, y) block coordinates, w x h blocks.
struct BlockBox {
  int x = 0, y = 0, w = 0, h = 0;
  bool operator==(const BlockBox&) const = default;
};

/// Unenriched block Fisher vectors embedded through the PHOC window model.
/// Blocks without descriptors embed to zero.
PageAttributeMap build_page_map(const GrayImage& page,
                                const std::string& page_id,
                                const VisualVocabulary& vocab,
                                const AttributeModel& model, int block_size,
                                const DescriptorParams& dp = {},
                                Exec exec = Exec::parallel);

IntegralAttributeImage build_integral(const PageAttributeMap& map,
                                      Exec exec = Exec::parallel);

/// Channel-wise sum over the box via the 4-corner identity, unnormalized.
Eigen::VectorXf window_sum(const IntegralAttributeImage& integral,
                           const BlockBox& box);

/// L2-normalized window_sum (zero stays zero). Throws OutOfBounds for boxes
/// leaving the block grid.
Eigen::VectorXf window_embedding(const IntegralAttributeImage& integral,
                                 const BlockBox& box);

/// Map cache file ("SMAP1"): keyed by page id, bundle hash and block size.
void write_page_map(const std::filesystem::path& path,
                    const PageAttributeMap& map, std::uint64_t bundle_hash);
PageAttributeMap read_page_map(const std::filesystem::path& path,
                               std::uint64_t expected_bundle_hash);

}  // namespace spot
