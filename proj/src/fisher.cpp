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

constexpr std::int64_t kFvChunk = 1024;

struct FvStats {
  Eigen::VectorXd s0;      // K
  Eigen::MatrixXd s1, s2;  // K x D
};

// Reduced (and optionally coordinate enriched) view of one descriptor.
Eigen::VectorXd reduced_descriptor(const DenseDescriptorSet& desc,
                                   const VisualVocabulary& vocab, bool enrich,
                                   const std::optional<FloatBox>& region,
                                   int i) {
  const Eigen::VectorXf red =
      vocab.pca.project(desc.vectors.row(i).transpose());
  Eigen::VectorXd z(vocab.gmm.dim());
  z.head(red.size()) = red.cast<double>();
  if (enrich) {
    const KeyPoint& kp = desc.keypoints[static_cast<std::size_t>(i)];
    const float w = std::max(1.f, region->w);
    const float h = std::max(1.f, region->h);
    z(red.size()) = (kp.x - region->x) / w - 0.5;
    z(red.size() + 1) = (kp.y - region->y) / h - 0.5;
  }
  return z;
}

FvStats accumulate_fv(const DenseDescriptorSet& desc,
                      const VisualVocabulary& vocab, bool enrich,
                      const std::optional<FloatBox>& region, Exec exec) {
  const int k = vocab.gmm.components();
  const int d = vocab.gmm.dim();
  const Eigen::VectorXd log_weights =
      vocab.gmm.weights.cast<double>().array().log();
  const Eigen::MatrixXd means = vocab.gmm.means.cast<double>();
  const Eigen::MatrixXd variances = vocab.gmm.variances.cast<double>();
  Eigen::VectorXd log_norm(k);
  for (int j = 0; j < k; ++j)
    log_norm(j) = -0.5 * variances.row(j).array().log().sum();

  auto make = [&] {
    FvStats s;
    s.s0 = Eigen::VectorXd::Zero(k);
    s.s1 = Eigen::MatrixXd::Zero(k, d);
    s.s2 = Eigen::MatrixXd::Zero(k, d);
    return s;
  };
  auto chunk = [&](FvStats& s, std::int64_t b, std::int64_t e) {
    Eigen::VectorXd logp(k);
    for (std::int64_t t = b; t < e; ++t) {
      const Eigen::VectorXd z =
          reduced_descriptor(desc, vocab, enrich, region, static_cast<int>(t));
      for (int j = 0; j < k; ++j) {
        const double q = ((z - means.row(j).transpose()).array().square() /
                          variances.row(j).transpose().array())
                             .sum();
        logp(j) = log_weights(j) + log_norm(j) - 0.5 * q;
      }
      const double mx = logp.maxCoeff();
      const double lse = mx + std::log((logp.array() - mx).exp().sum());
      for (int j = 0; j < k; ++j) {
        const double g = std::exp(logp(j) - lse);
        s.s0(j) += g;
        s.s1.row(j) += g * z.transpose();
        s.s2.row(j) += g * z.array().square().matrix().transpose();
      }
    }
  };
  auto merge = [](FvStats& total, const FvStats& s) {
    total.s0 += s.s0;
    total.s1 += s.s1;
    total.s2 += s.s2;
  };
  return chunked_reduce<FvStats>(desc.count(), kFvChunk, exec, make, chunk,
                                 merge);
}

void check_inputs(const DenseDescriptorSet& desc, const VisualVocabulary& vocab,
                  bool enrich, const std::optional<FloatBox>& region) {
  if (enrich != vocab.enriched)
    fail(Err::DimensionMismatch,
         enrich ? "enriched FV requested with an unenriched vocabulary"
                : "unenriched FV requested with an enriched vocabulary");
  if (enrich && !region.has_value())
    fail(Err::Usage, "enriched FV requires a region box");
  const int base = vocab.gmm.dim() - (enrich ? 2 : 0);
  if (base != vocab.pca.out_dim())
    fail(Err::DimensionMismatch, "vocabulary PCA/GMM dimensions disagree");
  if (desc.count() > 0 && desc.vectors.cols() != vocab.pca.in_dim())
    fail(Err::DimensionMismatch, "descriptor dimension does not match PCA");
}

}  // namespace

Eigen::VectorXf fisher_vector_unnormalized(
    const DenseDescriptorSet& desc, const VisualVocabulary& vocab, bool enrich,
    const std::optional<FloatBox>& region, Exec exec) {
  check_inputs(desc, vocab, enrich, region);
  const int k = vocab.gmm.components();
  const int d = vocab.gmm.dim();
  Eigen::VectorXf out = Eigen::VectorXf::Zero(2 * k * d);
  const std::int64_t t = desc.count();
  if (t == 0) return out;

  const FvStats stats = accumulate_fv(desc, vocab, enrich, region, exec);
  const Eigen::MatrixXd means = vocab.gmm.means.cast<double>();
  const Eigen::MatrixXd variances = vocab.gmm.variances.cast<double>();

  for (int j = 0; j < k; ++j) {
    const double wj = vocab.gmm.weights(j);
    const Eigen::ArrayXd mu = means.row(j).transpose().array();
    const Eigen::ArrayXd sd = variances.row(j).transpose().array().sqrt();
    const Eigen::ArrayXd var = variances.row(j).transpose().array();
    const Eigen::ArrayXd s1 = stats.s1.row(j).transpose().array();
    const Eigen::ArrayXd s2 = stats.s2.row(j).transpose().array();
    const double s0 = stats.s0(j);

    const Eigen::ArrayXd grad_mu =
        (s1 - mu * s0) / (sd * (t * std::sqrt(wj)));
    const Eigen::ArrayXd grad_var =
        ((s2 - 2.0 * mu * s1 + mu.square() * s0) / var - s0) /
        (t * std::sqrt(2.0 * wj));

    out.segment(j * d, d) = grad_mu.cast<float>();
    out.segment(k * d + j * d, d) = grad_var.cast<float>();
  }
  return out;
}

FisherVector fisher_vector(const DenseDescriptorSet& desc,
                           const VisualVocabulary& vocab, bool enrich,
                           const std::optional<FloatBox>& region, Exec exec) {
  FisherVector fv;
  if (desc.count() == 0) {
    check_inputs(desc, vocab, enrich, region);
    fv.values = Eigen::VectorXf::Zero(vocab.fisher_dim());
    fv.empty = true;
    return fv;
  }
  Eigen::VectorXf raw =
      fisher_vector_unnormalized(desc, vocab, enrich, region, exec);
  // power normalization then L2
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const float v = raw(i);
    raw(i) = v >= 0 ? std::sqrt(v) : -std::sqrt(-v);
  }
  const float norm = raw.norm();
  if (norm > 1e-12f) raw /= norm;
  fv.values = raw;
  return fv;
}

BlockFvGrid block_fisher_vectors(const GrayImage& page,
                                 const VisualVocabulary& vocab, int block_size,
                                 const DescriptorParams& dp, Exec exec) {
  if (block_size < 1) fail(Err::Usage, "block size must be >= 1");
  if (block_size < dp.step)
    fail(Err::Usage, "block size must be >= descriptor step");

  const DenseDescriptorSet all =
      extract_dense_descriptors(page, dp.step, dp.scales, exec);

  BlockFvGrid grid;
  grid.block_size = block_size;
  grid.grid_w = (page.width + block_size - 1) / block_size;
  grid.grid_h = (page.height + block_size - 1) / block_size;
  const std::size_t cells =
      static_cast<std::size_t>(grid.grid_w) * grid.grid_h;

  // bucket descriptor indices by the block containing their center
  std::vector<std::vector<int>> members(cells);
  for (int i = 0; i < all.count(); ++i) {
    const int bx = static_cast<int>(all.keypoints[static_cast<std::size_t>(i)].x) /
                   block_size;
    const int by = static_cast<int>(all.keypoints[static_cast<std::size_t>(i)].y) /
                   block_size;
    members[static_cast<std::size_t>(by) * grid.grid_w + bx].push_back(i);
  }

  grid.cells.resize(cells);
  parallel_for(static_cast<std::int64_t>(cells), exec, [&](std::int64_t c) {
    const auto& idx = members[static_cast<std::size_t>(c)];
    DenseDescriptorSet sub;
    sub.image_width = all.image_width;
    sub.image_height = all.image_height;
    sub.keypoints.reserve(idx.size());
    sub.vectors.resize(static_cast<Eigen::Index>(idx.size()), kDescriptorDim);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      sub.keypoints.push_back(all.keypoints[static_cast<std::size_t>(idx[i])]);
      sub.vectors.row(static_cast<Eigen::Index>(i)) = all.vectors.row(idx[i]);
    }
    // block FVs run serially inside the (possibly parallel) block loop
    grid.cells[static_cast<std::size_t>(c)] =
        fisher_vector(sub, vocab, false, std::nullopt, Exec::serial);
  });
  return grid;
}

}  // namespace spot
