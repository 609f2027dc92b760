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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spot/error.hpp"
#include "spot/rng.hpp"
#include "spot/visual_features.hpp"

namespace spot {

namespace {

using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::int64_t kEmChunk = 1024;

// Pools descriptors from all samples, optionally appending the sample-local
// normalized coordinates, with a deterministic stride subsample cap.
RowMajorMatrixXd pool_descriptors(const std::vector<DenseDescriptorSet>& samples,
                                  const Pca& pca, bool enrich, int cap) {
  std::int64_t total = 0;
  for (const auto& s : samples) total += s.count();
  const std::int64_t stride = total > cap ? (total + cap - 1) / cap : 1;

  const int out_dim = pca.out_dim() + (enrich ? 2 : 0);
  std::vector<Eigen::VectorXd> rows;
  std::int64_t index = 0;
  for (const auto& s : samples) {
    for (int i = 0; i < s.count(); ++i, ++index) {
      if (index % stride != 0) continue;
      const Eigen::VectorXf red = pca.project(s.vectors.row(i).transpose());
      Eigen::VectorXd row(out_dim);
      row.head(pca.out_dim()) = red.cast<double>();
      if (enrich) {
        const KeyPoint& kp = s.keypoints[static_cast<std::size_t>(i)];
        row(pca.out_dim()) = kp.x / std::max(1, s.image_width) - 0.5;
        row(pca.out_dim() + 1) = kp.y / std::max(1, s.image_height) - 0.5;
      }
      rows.push_back(std::move(row));
    }
  }
  RowMajorMatrixXd x(static_cast<Eigen::Index>(rows.size()), out_dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return x;
}

Pca fit_pca(const std::vector<DenseDescriptorSet>& samples, int out_dim,
            int cap) {
  std::int64_t total = 0;
  for (const auto& s : samples) total += s.count();
  const std::int64_t stride = total > cap ? (total + cap - 1) / cap : 1;

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(kDescriptorDim);
  std::int64_t used = 0, index = 0;
  for (const auto& s : samples)
    for (int i = 0; i < s.count(); ++i, ++index) {
      if (index % stride != 0) continue;
      mean += s.vectors.row(i).transpose().cast<double>();
      ++used;
    }
  mean /= std::max<std::int64_t>(1, used);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(kDescriptorDim, kDescriptorDim);
  index = 0;
  for (const auto& s : samples)
    for (int i = 0; i < s.count(); ++i, ++index) {
      if (index % stride != 0) continue;
      const Eigen::VectorXd d = s.vectors.row(i).transpose().cast<double>() - mean;
      cov.noalias() += d * d.transpose();
    }
  cov /= std::max<std::int64_t>(1, used);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    fail(Err::NumericalFailure, "PCA eigendecomposition failed");

  Pca pca;
  pca.mean = mean.cast<float>();
  pca.components.resize(out_dim, kDescriptorDim);
  // eigenvalues ascending; take the top out_dim, sign-fixed for determinism
  for (int c = 0; c < out_dim; ++c) {
    Eigen::VectorXd v = eig.eigenvectors().col(kDescriptorDim - 1 - c);
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    pca.components.row(c) = v.transpose().cast<float>();
  }
  return pca;
}

struct EmStats {
  Eigen::VectorXd n;       // K
  Eigen::MatrixXd sum_x;   // K x D
  Eigen::MatrixXd sum_x2;  // K x D
  double log_likelihood = 0;
};

// log N(x; mu_k, sigma_k^2) up to the shared -D/2 log(2pi) constant folded in.
struct GmmWork {
  Eigen::MatrixXd means, variances;  // K x D
  Eigen::VectorXd log_weights;       // K
  Eigen::VectorXd log_norm;          // K: -0.5 * sum(log var) - D/2 log(2pi)
};

EmStats accumulate_em(const RowMajorMatrixXd& x, const GmmWork& w, Exec exec) {
  const int k = static_cast<int>(w.log_weights.size());
  const int d = static_cast<int>(w.means.cols());
  auto make = [&] {
    EmStats s;
    s.n = Eigen::VectorXd::Zero(k);
    s.sum_x = Eigen::MatrixXd::Zero(k, d);
    s.sum_x2 = Eigen::MatrixXd::Zero(k, d);
    return s;
  };
  auto chunk = [&](EmStats& s, std::int64_t b, std::int64_t e) {
    Eigen::VectorXd logp(k);
    for (std::int64_t t = b; t < e; ++t) {
      const auto xt = x.row(t);
      for (int j = 0; j < k; ++j) {
        const double q =
            ((xt.transpose() - w.means.row(j).transpose()).array().square() /
             w.variances.row(j).transpose().array())
                .sum();
        logp(j) = w.log_weights(j) + w.log_norm(j) - 0.5 * q;
      }
      const double mx = logp.maxCoeff();
      const double lse = mx + std::log((logp.array() - mx).exp().sum());
      s.log_likelihood += lse;
      for (int j = 0; j < k; ++j) {
        const double g = std::exp(logp(j) - lse);
        s.n(j) += g;
        s.sum_x.row(j) += g * xt;
        s.sum_x2.row(j) += g * xt.array().square().matrix();
      }
    }
  };
  auto merge = [](EmStats& total, const EmStats& s) {
    total.n += s.n;
    total.sum_x += s.sum_x;
    total.sum_x2 += s.sum_x2;
    total.log_likelihood += s.log_likelihood;
  };
  return chunked_reduce<EmStats>(x.rows(), kEmChunk, exec, make, chunk, merge);
}

// k-means++ seeding over a deterministic subsample.
Eigen::MatrixXd seed_means(const RowMajorMatrixXd& x, int k, Rng& rng) {
  const std::int64_t n = x.rows();
  Eigen::MatrixXd means(k, x.cols());
  means.row(0) = x.row(static_cast<Eigen::Index>(rng.below(n)));
  Eigen::VectorXd dist2 =
      (x.rowwise() - means.row(0).cast<double>().eval()).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      const double target = rng.uniform() * total;
      double acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2(i);
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(n));
    }
    means.row(j) = x.row(pick);
    dist2 = dist2.cwiseMin(
        (x.rowwise() - means.row(j).cast<double>().eval()).rowwise().squaredNorm());
  }
  return means;
}

}  // namespace

Eigen::VectorXf Pca::project(const Eigen::VectorXf& x) const {
  return components * (x - mean);
}

VisualVocabulary fit_vocabulary(const std::vector<DenseDescriptorSet>& samples,
                                const VocabularyParams& params,
                                std::uint64_t seed, Exec exec) {
  if (params.reduced_dim < 1 || params.reduced_dim > kDescriptorDim)
    fail(Err::Usage, "reduced_dim must be in [1, 128]");
  if (params.components < 1) fail(Err::Usage, "components must be >= 1");

  std::int64_t total = 0;
  for (const auto& s : samples) total += s.count();
  if (total < 10ll * params.components)
    fail(Err::InsufficientData,
         "need at least 10*K descriptors, got " + std::to_string(total));

  VisualVocabulary vocab;
  vocab.enriched = params.enrich;
  vocab.pca = fit_pca(samples, params.reduced_dim,
                      params.max_training_descriptors);

  const RowMajorMatrixXd x = pool_descriptors(
      samples, vocab.pca, params.enrich, params.max_training_descriptors);
  const int k = params.components;
  const int d = static_cast<int>(x.cols());
  const std::int64_t n = x.rows();

  GmmWork w;
  Rng rng(derive_seed(seed, 0x6d6dull));
  w.means = seed_means(x, k, rng);
  w.log_weights = Eigen::VectorXd::Constant(k, std::log(1.0 / k));

  const Eigen::VectorXd global_mean = x.colwise().mean();
  Eigen::VectorXd global_var =
      ((x.rowwise() - global_mean.transpose()).array().square().colwise().sum() /
       std::max<std::int64_t>(1, n - 1))
          .transpose();
  const double floor_value =
      std::max(params.variance_floor_ratio * global_var.mean(), 1e-12);
  global_var = global_var.cwiseMax(floor_value);
  w.variances = global_var.transpose().replicate(k, 1);

  const double log2pi = std::log(2.0 * 3.14159265358979323846);
  auto refresh_log_norm = [&] {
    w.log_norm.resize(k);
    for (int j = 0; j < k; ++j)
      w.log_norm(j) = -0.5 * (w.variances.row(j).array().log().sum() +
                              d * log2pi);
  };
  refresh_log_norm();

  double prev_ll = -std::numeric_limits<double>::infinity();
  vocab.em_converged = false;
  for (int iter = 0; iter < params.em_max_iterations; ++iter) {
    const EmStats stats = accumulate_em(x, w, exec);

    for (int j = 0; j < k; ++j) {
      const double nj = std::max(stats.n(j), 1e-10);
      w.means.row(j) = stats.sum_x.row(j) / nj;
      w.variances.row(j) =
          (stats.sum_x2.row(j) / nj -
           w.means.row(j).array().square().matrix())
              .cwiseMax(floor_value);
      w.log_weights(j) = std::log(std::max(stats.n(j) / n, 1e-10));
    }
    refresh_log_norm();

    const double ll = stats.log_likelihood / n;
    if (iter > 0 &&
        std::abs(ll - prev_ll) <= params.em_tolerance * std::abs(prev_ll)) {
      vocab.em_converged = true;
      break;
    }
    prev_ll = ll;
  }

  vocab.gmm.weights = w.log_weights.array().exp().cast<float>();
  vocab.gmm.weights /= vocab.gmm.weights.sum();
  vocab.gmm.means = w.means.cast<float>();
  vocab.gmm.variances = w.variances.cast<float>();
  return vocab;
}

}  // namespace spot
