#include "vulngraph/encoders/node2vec.hpp"

#include <cmath>

#include "vulngraph/common/rng.hpp"

namespace vulngraph::encoders {

namespace {

double sig(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

tensor::Tensor node2vec_embed(std::size_t n,
                              const std::vector<graph::Edge>& edges,
                              const Node2VecConfig& config) {
  std::size_t d = config.dim;
  std::mt19937_64 rng(config.seed);

  graph::WalkConfig wc = config.walks;
  wc.seed = config.seed;
  auto walks = graph::random_walks(n, edges, wc);

  std::vector<double> in(n * d), out(n * d, 0.0);
  double span = 0.5 / static_cast<double>(d);
  for (auto& v : in) v = uniform_range(-span, span, rng);

  std::vector<double> grad_center(d);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& walk : walks) {
      for (std::size_t c = 0; c < walk.size(); ++c) {
        std::size_t lo = c >= config.window ? c - config.window : 0;
        std::size_t hi = std::min(walk.size(), c + config.window + 1);
        for (std::size_t t = lo; t < hi; ++t) {
          if (t == c) continue;
          double* vc = in.data() + walk[c] * d;
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          // positive pair, then negatives with target 0
          for (std::size_t k = 0; k <= config.negatives; ++k) {
            std::size_t tgt;
            double label;
            if (k == 0) {
              tgt = walk[t];
              label = 1.0;
            } else {
              tgt = sample_uniform(n, rng);
              if (tgt == walk[t]) continue;
              label = 0.0;
            }
            double* u = out.data() + tgt * d;
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += vc[j] * u[j];
            double coef = (sig(dot) - label) * config.lr;
            for (std::size_t j = 0; j < d; ++j) {
              grad_center[j] += coef * u[j];
              u[j] -= coef * vc[j];
            }
          }
          for (std::size_t j = 0; j < d; ++j) vc[j] -= grad_center[j];
        }
      }
    }
  }
  return tensor::Tensor::from_data({n, d}, std::move(in), false);
}

}  // namespace vulngraph::encoders
