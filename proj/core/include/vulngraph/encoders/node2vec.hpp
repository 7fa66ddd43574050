#pragma once

#include <cstdint>

#include "vulngraph/graph/walks.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::encoders {

/// Skip-gram with negative sampling over node2vec walks, trained with
/// plain SGD on raw arrays (the result is frozen, so nothing here
/// needs the autodiff tape). Deterministic for a fixed seed.
struct Node2VecConfig {
  std::size_t dim = 128;
  graph::WalkConfig walks;
  std::size_t window = 3;
  std::size_t negatives = 4;
  std::size_t epochs = 3;
  double lr = 0.025;
  std::uint64_t seed = 0;
};

/// Returns frozen per-node embeddings [n, dim].
tensor::Tensor node2vec_embed(std::size_t n,
                              const std::vector<graph::Edge>& edges,
                              const Node2VecConfig& config);

}  // namespace vulngraph::encoders
