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
#include <optional>
#include <vector>

#include "spot/exec.hpp"
#include "spot/image.hpp"

namespace spot {

inline constexpr int kDescriptorDim = 128;  // 4x4 spatial bins x 8 orientations

struct KeyPoint {
  float x = 0, y = 0, scale = 0;
  bool operator==(const KeyPoint&) const = default;
};

/// Dense local gradient descriptors on a regular grid. Grid order is
/// scale-major, then row-major; the parallel extraction lane preserves it.
struct DenseDescriptorSet {
  int image_width = 0, image_height = 0;
  std::vector<KeyPoint> keypoints;
  // one row per keypoint; L2-normalized or all-zero (flat patch)
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> vectors;

  int count() const { return static_cast<int>(keypoints.size()); }
};

struct DescriptorParams {
  int step = 4;
  std::vector<int> scales = {8, 12, 16, 24};  // patch widths, px
};

/// Descriptors at every grid point whose patch fits inside the image
/// (margin = half patch width, per scale). Scales larger than the image are
/// skipped; if not even the smallest fits, throws ImageTooSmall.
DenseDescriptorSet extract_dense_descriptors(const GrayImage& image, int step,
                                             const std::vector<int>& scales,
                                             Exec exec = Exec::parallel);

struct Pca {
  Eigen::VectorXf mean;        // input dim
  Eigen::MatrixXf components;  // out_dim x in_dim, orthonormal rows

  int in_dim() const { return static_cast<int>(mean.size()); }
  int out_dim() const { return static_cast<int>(components.rows()); }
  Eigen::VectorXf project(const Eigen::VectorXf& x) const;
};

struct Gmm {
  Eigen::VectorXf weights;    // K, positive, sums to 1
  Eigen::MatrixXf means;      // K x D
  Eigen::MatrixXf variances;  // K x D, diagonal, floored

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

/// PCA projection plus a diagonal GMM over the (optionally coordinate
/// enriched) reduced descriptors.
struct VisualVocabulary {
  Pca pca;
  Gmm gmm;
  bool enriched = false;     // GMM input dim is pca.out_dim() + 2 when set
  bool em_converged = true;  // warning flag, not an error

  int fisher_dim() const { return 2 * gmm.components() * gmm.dim(); }
};

struct VocabularyParams {
  int reduced_dim = 62;
  int components = 16;
  bool enrich = false;  // append (x, y) normalized to the sample image
  int em_max_iterations = 100;
  double em_tolerance = 1e-5;         // relative log-likelihood change
  double variance_floor_ratio = 1e-4; // of the average feature variance
  int max_training_descriptors = 200000;  // deterministic stride subsample
};

/// Fits PCA on the pooled descriptors and a GMM (EM, k-means++ seeding) on
/// the reduced ones. Deterministic given the seed and independent of the
/// thread count. Needs at least 10*K descriptors.
VisualVocabulary fit_vocabulary(const std::vector<DenseDescriptorSet>& samples,
                                const VocabularyParams& params,
                                std::uint64_t seed,
                                Exec exec = Exec::parallel);

struct FisherVector {
  Eigen::VectorXf values;  // 2 * K * D
  bool empty = false;      // produced from zero descriptors
};

struct FloatBox {
  float x = 0, y = 0, w = 0, h = 0;
};

/// Improved Fisher vector (power + L2 normalization) of a descriptor set.
/// enrich appends region-normalized (x, y) to each reduced descriptor and
/// requires an enriched vocabulary plus a region box. An empty descriptor
/// set yields the zero vector flagged empty.
FisherVector fisher_vector(const DenseDescriptorSet& desc,
                           const VisualVocabulary& vocab, bool enrich,
                           const std::optional<FloatBox>& region = std::nullopt,
                           Exec exec = Exec::parallel);

/// Raw FV statistics before power/L2 normalization; layout is K blocks of
/// mean gradients followed by K blocks of variance gradients.
Eigen::VectorXf fisher_vector_unnormalized(
    const DenseDescriptorSet& desc, const VisualVocabulary& vocab, bool enrich,
    const std::optional<FloatBox>& region = std::nullopt,
    Exec exec = Exec::parallel);

struct BlockFvGrid {
  int grid_w = 0, grid_h = 0;  // ceil(w/N) x ceil(h/N)
  int block_size = 0;
  std::vector<FisherVector> cells;  // row-major

  const FisherVector& at(int bx, int by) const {
    return cells[static_cast<std::size_t>(by) * grid_w + bx];
  }
};

/// One unenriched Fisher vector per NxN block, from the descriptors whose
/// centers fall in the block. Blocks partition the page descriptor set.
BlockFvGrid block_fisher_vectors(const GrayImage& page,
                                 const VisualVocabulary& vocab, int block_size,
                                 const DescriptorParams& dp = {},
                                 Exec exec = Exec::parallel);

}  // namespace spot
