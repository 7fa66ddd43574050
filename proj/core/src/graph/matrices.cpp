#include "vulngraph/graph/matrices.hpp"

#include <algorithm>
#include <cmath>

#include "vulngraph/common/error.hpp"

namespace vulngraph::graph {

GraphMatrices build_matrices(std::size_t n, const std::vector<Edge>& edges) {
  GraphMatrices g;
  g.n = n;
  g.adjacency.assign(n * n, 0.0);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n)
      throw DomainError("edge (" + std::to_string(a) + "," +
                        std::to_string(b) + ") outside graph of size " +
                        std::to_string(n));
    g.adjacency[a * n + b] = 1.0;
  }

  g.out_degree.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.out_degree[i] += g.adjacency[i * n + j];

  g.laplacian.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      g.laplacian[i * n + j] = -g.adjacency[i * n + j];
    g.laplacian[i * n + i] += g.out_degree[i];
  }

  g.sym_adjacency.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.sym_adjacency[i * n + j] =
          std::max(g.adjacency[i * n + j], g.adjacency[j * n + i]);

  g.sym_degree.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.sym_degree[i] += g.sym_adjacency[i * n + j];

  g.sym_laplacian.assign(n * n, 0.0);
  std::vector<double> dinv(n);
  for (std::size_t i = 0; i < n; ++i)
    dinv[i] = g.sym_degree[i] > 0.0 ? 1.0 / std::sqrt(g.sym_degree[i]) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      g.sym_laplacian[i * n + j] =
          -dinv[i] * g.sym_adjacency[i * n + j] * dinv[j];
    g.sym_laplacian[i * n + i] += 1.0;
  }
  return g;
}

std::vector<Edge> symmetrized_unique_edges(std::size_t n,
                                           const std::vector<Edge>& edges) {
  std::vector<Edge> out;
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n)
      throw DomainError("edge outside graph of size " + std::to_string(n));
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace vulngraph::graph
