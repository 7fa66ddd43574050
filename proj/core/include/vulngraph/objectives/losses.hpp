#pragma once

#include <utility>
#include <vector>

#include "vulngraph/graph/matrices.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::objectives {

using tensor::Tensor;

struct LossConfig {
  double lambda_nce = 0.1;
  double lambda_lap = 0.01;
  double tau = 0.1;        // InfoNCE temperature
  double pos_weight = 1.0;  // positive-class weight for BCE

  void validate() const;  // ConfigError
};

/// Mean binary cross-entropy over a batch, evaluated from logits so no
/// probability ever needs clamping.
Tensor bce(const Tensor& logits, const std::vector<double>& labels,
           double pos_weight = 1.0);

/// In-batch InfoNCE: row i of g attends over every row of l, the
/// diagonal being the positive pair. Inputs are L2-normalized here, so
/// similarities are cosines.
Tensor info_nce(const Tensor& g_hat, const Tensor& l_hat, double tau);

/// The same loss starting from a precomputed similarity matrix.
Tensor info_nce_from_sims(const Tensor& sims, double tau);  // DomainError

/// Structural smoothness: mean over graphs of the edge-sum
/// sum_{(u,v) in E} ||h_u - h_v||^2 (directed edges, self-loops
/// contribute zero). Graphs without edges contribute zero.
Tensor laplacian_reg(
    const std::vector<Tensor>& node_embeddings,
    const std::vector<std::vector<graph::Edge>>& edges);

struct LossParts {
  Tensor cls;  // required
  Tensor nce;  // optional; undefined -> treated as zero
  Tensor lap;  // optional; undefined -> treated as zero
};

/// L = cls + lambda_nce * nce + lambda_lap * lap
Tensor total_loss(const LossParts& parts, const LossConfig& config);

}  // namespace vulngraph::objectives
