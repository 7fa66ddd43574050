#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "vulngraph/graph/matrices.hpp"

namespace vulngraph::graph {

/// node2vec-style biased random walk settings. p is the return
/// parameter (weight 1/p for stepping back), q the in-out parameter
/// (weight 1/q for moving away); neighbors of the previous node keep
/// weight 1. p = q = 1 degenerates to a uniform second-order walk.
struct WalkConfig {
  std::size_t walk_length = 8;     // nodes per walk, start included
  std::size_t walks_per_node = 4;
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 0;
};

/// Sorted, deduplicated undirected neighbor lists of the symmetrized
/// graph (self loops dropped: a walk never needs them).
std::vector<std::vector<std::size_t>> neighbor_lists(
    std::size_t n, const std::vector<Edge>& edges);

/// Generates walks_per_node walks starting at every node, in node
/// order. Walks stop early at dead ends. Deterministic for a fixed
/// seed: a single generator is consumed in iteration order.
std::vector<std::vector<std::size_t>> random_walks(
    std::size_t n, const std::vector<Edge>& edges, const WalkConfig& config);

}  // namespace vulngraph::graph
