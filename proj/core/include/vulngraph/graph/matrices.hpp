#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace vulngraph::graph {

using Edge = std::pair<std::size_t, std::size_t>;

/// Dense matrix bundle for one graph, row-major n x n throughout.
/// CFGs average a few dozen nodes, so dense storage is the simple and
/// fast choice at this scale.
struct GraphMatrices {
  std::size_t n = 0;
  std::vector<double> adjacency;      // A, directed
  std::vector<double> out_degree;     // diagonal of D (row sums of A)
  std::vector<double> laplacian;      // L = D - A
  std::vector<double> sym_adjacency;  // As = max(A, A^T)
  std::vector<double> sym_degree;     // diagonal of Ds (row sums of As)
  std::vector<double> sym_laplacian;  // I - Ds^{-1/2} As Ds^{-1/2}

  double at(const std::vector<double>& m, std::size_t i, std::size_t j) const {
    return m[i * n + j];
  }
};

/// Builds every matrix from a directed edge list. Duplicate edges
/// collapse to weight 1; self loops are kept. Nodes with zero degree
/// contribute 0 through Ds^{-1/2} (so their sym_laplacian row is just
/// the identity row).
GraphMatrices build_matrices(std::size_t n, const std::vector<Edge>& edges);

/// Unique undirected edges (u < v) of the symmetrized graph, plus
/// self-loops as (u, u). Sorted.
std::vector<Edge> symmetrized_unique_edges(std::size_t n,
                                           const std::vector<Edge>& edges);

}  // namespace vulngraph::graph
