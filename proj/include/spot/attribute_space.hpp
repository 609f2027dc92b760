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
#include <vector>

#include "spot/exec.hpp"
#include "spot/text_embedding.hpp"
#include "spot/visual_features.hpp"

namespace spot {

/// Linear attribute classifiers plus the CCA calibration into the common
/// image/text subspace. One model per (embedding kind, Fisher-vector space)
/// pair; the bias is folded into w as an extra trailing input row.
struct AttributeModel {
  EmbeddingKind kind = EmbeddingKind::phoc;
  Eigen::MatrixXf w;           // (D+1) x d attribute classifiers
  Eigen::MatrixXf u_img;       // d x d'
  Eigen::MatrixXf u_txt;       // d x d'
  Eigen::VectorXf img_center;  // d, mean attribute scores over training
  Eigen::VectorXf txt_center;  // d, mean embedding bits over training

  int fisher_dim() const { return static_cast<int>(w.rows()) - 1; }
  int attribute_dim() const { return static_cast<int>(w.cols()); }
  int subspace_dim() const { return static_cast<int>(u_img.cols()); }

  /// Attribute scores w^T [fv; 1] for one Fisher vector.
  Eigen::VectorXf attribute_scores(const Eigen::VectorXf& fv) const;
};

struct SvmTrainOptions {
  float reg = 1e-4f;  // L2 regularization strength
  int epochs = 20;
  std::uint64_t seed = 1;
};

struct SvmTrainResult {
  Eigen::MatrixXf w;            // (D+1) x d
  std::vector<int> degenerate;  // attribute columns lacking both classes
};

/// One linear SVM per attribute column, trained by deterministic
/// stochastic subgradient descent on the hinge loss. Columns whose labels
/// are single-class are flagged degenerate and emit a constant negative
/// score. Column training is independent, so the parallel lane is
/// bit-identical to the serial one.
SvmTrainResult train_attribute_svms(
    const std::vector<FisherVector>& fvs,
    const std::vector<PyramidalTextEmbedding>& labels,
    const SvmTrainOptions& opts = {}, Exec exec = Exec::parallel);

struct CcaResult {
  Eigen::MatrixXf u_x, u_y;        // view dims x d'
  Eigen::VectorXd correlations;    // d', non-increasing, in [0, 1+eps]
  Eigen::VectorXf mean_x, mean_y;  // per-view centering
};

/// Regularized CCA between paired views (rows are samples). The ridge is
/// reg * trace(cov)/dim on each view's covariance.
CcaResult fit_cca(const Eigen::MatrixXf& view_x, const Eigen::MatrixXf& view_y,
                  int subspace_dim, double reg = 1e-3);

/// U_img^T (w^T[fv;1] - centering), L2-normalized; empty FV -> zero vector.
Eigen::VectorXf embed_image(const FisherVector& fv, const AttributeModel& m);

/// U_txt^T (bits - centering), L2-normalized.
Eigen::VectorXf embed_text(const PyramidalTextEmbedding& emb,
                           const AttributeModel& m);

/// Diagnostic: the purely linear map U_img^T W_linear^T fv with centering and
/// bias disabled, unnormalized. Exposes the scale-equivariance of the model.
Eigen::VectorXf embed_image_linear(const FisherVector& fv,
                                   const AttributeModel& m);

}  // namespace spot
