#include "vulngraph/graph/walks.hpp"

#include <algorithm>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/rng.hpp"

namespace vulngraph::graph {

std::vector<std::vector<std::size_t>> neighbor_lists(
    std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n)
      throw DomainError("edge outside graph of size " + std::to_string(n));
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

std::vector<std::vector<std::size_t>> random_walks(
    std::size_t n, const std::vector<Edge>& edges, const WalkConfig& config) {
  if (config.p <= 0.0 || config.q <= 0.0)
    throw DomainError("walk parameters p and q must be positive");
  auto adj = neighbor_lists(n, edges);
  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<std::size_t>> walks;
  walks.reserve(n * config.walks_per_node);
  std::vector<double> weights;

  for (std::size_t start = 0; start < n; ++start) {
    for (std::size_t w = 0; w < config.walks_per_node; ++w) {
      std::vector<std::size_t> walk = {start};
      while (walk.size() < config.walk_length) {
        std::size_t cur = walk.back();
        const auto& nb = adj[cur];
        if (nb.empty()) break;
        std::size_t next;
        if (walk.size() == 1) {
          next = nb[sample_uniform(nb.size(), rng)];
        } else {
          std::size_t prev = walk[walk.size() - 2];
          const auto& prev_nb = adj[prev];
          weights.clear();
          for (std::size_t cand : nb) {
            if (cand == prev)
              weights.push_back(1.0 / config.p);
            else if (std::binary_search(prev_nb.begin(), prev_nb.end(), cand))
              weights.push_back(1.0);
            else
              weights.push_back(1.0 / config.q);
          }
          next = nb[sample_weighted(weights, rng)];
        }
        walk.push_back(next);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

}  // namespace vulngraph::graph
