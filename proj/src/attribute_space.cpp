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

#include "spot/attribute_space.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "spot/error.hpp"
#include "spot/rng.hpp"

namespace spot {

namespace {

// Pegasos-style SGD on the hinge loss for a single attribute column.
// The step size 1/(lambda*(t+n)) is damped by one epoch worth of steps so
// the first updates stay bounded.
Eigen::VectorXf train_one_column(
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>&
        x,
    const std::vector<float>& y, const SvmTrainOptions& opts,
    std::uint64_t column_seed) {
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  const double lambda = opts.reg;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(column_seed);

  long long t = 0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    for (int i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t + n));
      const double margin =
          y[static_cast<std::size_t>(i)] *
          x.row(i).cast<double>().dot(w);
      w *= (1.0 - eta * lambda);
      if (margin < 1.0)
        w += (eta * y[static_cast<std::size_t>(i)]) *
             x.row(i).transpose().cast<double>();
    }
  }
  return w.cast<float>();
}

}  // namespace

Eigen::VectorXf AttributeModel::attribute_scores(
    const Eigen::VectorXf& fv) const {
  if (fv.size() + 1 != w.rows())
    fail(Err::ShapeMismatch,
         "Fisher vector dim " + std::to_string(fv.size()) +
             " does not match model input dim " + std::to_string(w.rows() - 1));
  return w.topRows(w.rows() - 1).transpose() * fv + w.row(w.rows() - 1).transpose();
}

SvmTrainResult train_attribute_svms(
    const std::vector<FisherVector>& fvs,
    const std::vector<PyramidalTextEmbedding>& labels,
    const SvmTrainOptions& opts, Exec exec) {
  if (fvs.size() != labels.size())
    fail(Err::ShapeMismatch, "fvs and labels differ in length");
  if (fvs.size() < 2) fail(Err::InsufficientData, "need at least 2 samples");

  const Eigen::Index n = static_cast<Eigen::Index>(fvs.size());
  const Eigen::Index fv_dim = fvs[0].values.size();
  const int d = labels[0].dim();
  for (const auto& fv : fvs)
    if (fv.values.size() != fv_dim)
      fail(Err::ShapeMismatch, "inconsistent Fisher vector dimensions");
  for (const auto& l : labels)
    if (l.dim() != d) fail(Err::ShapeMismatch, "inconsistent label dimensions");

  // samples with the constant bias feature appended
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(
      n, fv_dim + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i).head(fv_dim) = fvs[static_cast<std::size_t>(i)].values.transpose();
    x(i, fv_dim) = 1.f;
  }

  SvmTrainResult result;
  result.w = Eigen::MatrixXf::Zero(fv_dim + 1, d);
  std::vector<std::uint8_t> degenerate_flag(static_cast<std::size_t>(d), 0);

  parallel_for(d, exec, [&](std::int64_t j) {
    std::vector<float> y(static_cast<std::size_t>(n));
    int positives = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool bit =
          labels[static_cast<std::size_t>(i)].bits[static_cast<std::size_t>(j)] !=
          0;
      y[static_cast<std::size_t>(i)] = bit ? 1.f : -1.f;
      positives += bit ? 1 : 0;
    }
    if (positives == 0 || positives == n) {
      // single-class column: constant negative score via the bias row
      degenerate_flag[static_cast<std::size_t>(j)] = 1;
      result.w(fv_dim, j) = -1.f;
      return;
    }
    result.w.col(j) = train_one_column(
        x, y, opts, derive_seed(opts.seed, static_cast<std::uint64_t>(j)));
  });

  for (int j = 0; j < d; ++j)
    if (degenerate_flag[static_cast<std::size_t>(j)])
      result.degenerate.push_back(j);
  return result;
}

CcaResult fit_cca(const Eigen::MatrixXf& view_x, const Eigen::MatrixXf& view_y,
                  int subspace_dim, double reg) {
  const Eigen::Index n = view_x.rows();
  if (view_y.rows() != n)
    fail(Err::ShapeMismatch, "views have different sample counts");
  const Eigen::Index dx = view_x.cols();
  const Eigen::Index dy = view_y.cols();
  if (subspace_dim < 1 || subspace_dim > std::min(dx, dy))
    fail(Err::Usage, "subspace_dim must be in [1, min(view dims)]");
  if (n < subspace_dim + 1)
    fail(Err::InsufficientPairs,
         "need at least subspace_dim+1 paired samples, got " +
             std::to_string(n));

  const Eigen::MatrixXd x = view_x.cast<double>();
  const Eigen::MatrixXd y = view_y.cast<double>();
  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const Eigen::RowVectorXd mean_y = y.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean_x;
  const Eigen::MatrixXd yc = y.rowwise() - mean_y;

  const double denom = static_cast<double>(std::max<Eigen::Index>(1, n - 1));
  Eigen::MatrixXd sxx = xc.transpose() * xc / denom;
  Eigen::MatrixXd syy = yc.transpose() * yc / denom;
  const Eigen::MatrixXd sxy = xc.transpose() * yc / denom;

  sxx.diagonal().array() += reg * sxx.trace() / static_cast<double>(dx) + 1e-12;
  syy.diagonal().array() += reg * syy.trace() / static_cast<double>(dy) + 1e-12;

  auto inverse_sqrt = [](const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    if (eig.info() != Eigen::Success)
      fail(Err::NumericalFailure, "covariance eigendecomposition failed");
    const double floor = std::max(eig.eigenvalues().maxCoeff(), 1e-300) * 1e-12;
    const Eigen::ArrayXd inv =
        eig.eigenvalues().array().max(floor).rsqrt();
    return Eigen::MatrixXd(eig.eigenvectors() * inv.matrix().asDiagonal() *
                           eig.eigenvectors().transpose());
  };

  const Eigen::MatrixXd isx = inverse_sqrt(sxx);
  const Eigen::MatrixXd isy = inverse_sqrt(syy);
  const Eigen::MatrixXd m = isx * sxy * isy;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  Eigen::MatrixXd ux = isx * svd.matrixU().leftCols(subspace_dim);
  Eigen::MatrixXd uy = isy * svd.matrixV().leftCols(subspace_dim);

  // deterministic, swap-symmetric sign convention
  for (int c = 0; c < subspace_dim; ++c) {
    if (ux.col(c).sum() + uy.col(c).sum() < 0) {
      ux.col(c) = -ux.col(c);
      uy.col(c) = -uy.col(c);
    }
  }

  CcaResult out;
  out.u_x = ux.cast<float>();
  out.u_y = uy.cast<float>();
  out.correlations =
      svd.singularValues().head(subspace_dim).cwiseMax(0.0);
  out.mean_x = mean_x.transpose().cast<float>();
  out.mean_y = mean_y.transpose().cast<float>();
  return out;
}

Eigen::VectorXf embed_image(const FisherVector& fv, const AttributeModel& m) {
  if (fv.empty) return Eigen::VectorXf::Zero(m.subspace_dim());
  const Eigen::VectorXf scores = m.attribute_scores(fv.values);
  Eigen::VectorXf z = m.u_img.transpose() * (scores - m.img_center);
  const float norm = z.norm();
  if (norm > 1e-12f) z /= norm;
  return z;
}

Eigen::VectorXf embed_text(const PyramidalTextEmbedding& emb,
                           const AttributeModel& m) {
  if (emb.kind != m.kind)
    fail(Err::KindMismatch, "embedding kind does not match model kind");
  if (emb.dim() != m.attribute_dim())
    fail(Err::ShapeMismatch, "embedding dim " + std::to_string(emb.dim()) +
                                 " does not match model attribute dim " +
                                 std::to_string(m.attribute_dim()));
  Eigen::VectorXf bits(emb.dim());
  for (int i = 0; i < emb.dim(); ++i)
    bits(i) = static_cast<float>(emb.bits[static_cast<std::size_t>(i)]);
  Eigen::VectorXf z = m.u_txt.transpose() * (bits - m.txt_center);
  const float norm = z.norm();
  if (norm > 1e-12f) z /= norm;
  return z;
}

Eigen::VectorXf embed_image_linear(const FisherVector& fv,
                                   const AttributeModel& m) {
  if (fv.empty) return Eigen::VectorXf::Zero(m.subspace_dim());
  if (fv.values.size() + 1 != m.w.rows())
    fail(Err::ShapeMismatch, "Fisher vector dim does not match model");
  const Eigen::VectorXf scores =
      m.w.topRows(m.w.rows() - 1).transpose() * fv.values;
  return m.u_img.transpose() * scores;
}

}  // namespace spot
