#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vulngraph/graph/matrices.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::encoders {

using tensor::Tensor;
using Params = std::vector<std::pair<std::string, Tensor>>;

/// Per-graph constants shared by every layer type. Built once per CFG
/// and reused across epochs; all tensors are constant (no grad).
struct GraphContext {
  std::size_t n = 0;
  Tensor features;       // [n, d_in]
  Tensor gcn_norm_adj;   // Ahat = D~^{-1/2} (As + I) D~^{-1/2}
  Tensor attn_mask;      // 1 on (i,j) edges of As + I, else 0
  Tensor neighbor_mean;  // M[i][j] = 1/|N(i)| over As neighbors (no self)
};

GraphContext make_graph_context(const graph::GraphMatrices& m,
                                Tensor features);

/// One GCN convolution: phi(Ahat X W + b).
struct GcnLayer {
  Tensor w, b;
  GcnLayer(std::size_t d_in, std::size_t d_out, std::mt19937_64& rng);
  Tensor forward(const GraphContext& g, const Tensor& x, bool act) const;
  Params params(const std::string& prefix) const;
};

/// Multi-head graph attention. Scores decompose as
/// e_ij = LeakyReLU(s_src[i] + s_dst[j]) with s = (XW) a; softmax runs
/// over each node's masked neighborhood (self loops included). Heads
/// concatenate when `concat`, otherwise average (output layer).
struct GatLayer {
  struct Head {
    Tensor w, a_src, a_dst;
  };
  std::vector<Head> heads;
  bool concat = true;
  GatLayer(std::size_t d_in, std::size_t d_out_per_head, std::size_t n_heads,
           bool concat_heads, std::mt19937_64& rng);
  Tensor forward(const GraphContext& g, const Tensor& x, bool act) const;
  Params params(const std::string& prefix) const;
};

/// GraphSAGE mean aggregator: phi(W [x || mean_N(x)] + b); the
/// aggregate is the zero vector for nodes without neighbors.
struct SageLayer {
  Tensor w, b;
  SageLayer(std::size_t d_in, std::size_t d_out, std::mt19937_64& rng);
  Tensor forward(const GraphContext& g, const Tensor& x, bool act) const;
  Params params(const std::string& prefix) const;
};

}  // namespace vulngraph::encoders
