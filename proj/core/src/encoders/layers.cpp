#include "vulngraph/encoders/layers.hpp"

#include <cmath>

#include "vulngraph/tensor/init.hpp"

namespace vulngraph::encoders {

using namespace tensor;

GraphContext make_graph_context(const graph::GraphMatrices& m,
                                Tensor features) {
  std::size_t n = m.n;
  GraphContext g;
  g.n = n;
  g.features = std::move(features);

  // Ahat with self loops
  std::vector<double> a_self(m.sym_adjacency);
  for (std::size_t i = 0; i < n; ++i) a_self[i * n + i] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a_self[i * n + j];
  std::vector<double> ahat(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      ahat[i * n + j] =
          a_self[i * n + j] / std::sqrt(deg[i]) / std::sqrt(deg[j]);
  g.gcn_norm_adj = Tensor::from_data({n, n}, std::move(ahat), false);
  g.attn_mask = Tensor::from_data({n, n}, std::move(a_self), false);

  std::vector<double> mean(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double cnt = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m.sym_adjacency[i * n + j] > 0.0) cnt += 1.0;
    if (cnt == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m.sym_adjacency[i * n + j] > 0.0)
        mean[i * n + j] = 1.0 / cnt;
  }
  g.neighbor_mean = Tensor::from_data({n, n}, std::move(mean), false);
  return g;
}

// ---- GCN ----

GcnLayer::GcnLayer(std::size_t d_in, std::size_t d_out, std::mt19937_64& rng)
    : w(xavier_uniform(d_in, d_out, rng)),
      b(Tensor::zeros({1, d_out}, true)) {}

Tensor GcnLayer::forward(const GraphContext& g, const Tensor& x,
                         bool act) const {
  Tensor h = add(matmul(g.gcn_norm_adj, matmul(x, w)), b);
  return act ? gelu(h) : h;
}

Params GcnLayer::params(const std::string& prefix) const {
  return {{prefix + ".w", w}, {prefix + ".b", b}};
}

// ---- GAT ----

GatLayer::GatLayer(std::size_t d_in, std::size_t d_out_per_head,
                   std::size_t n_heads, bool concat_heads,
                   std::mt19937_64& rng)
    : concat(concat_heads) {
  for (std::size_t h = 0; h < n_heads; ++h)
    heads.push_back({xavier_uniform(d_in, d_out_per_head, rng),
                     xavier_uniform(d_out_per_head, 1, rng),
                     xavier_uniform(d_out_per_head, 1, rng)});
}

Tensor GatLayer::forward(const GraphContext& g, const Tensor& x,
                         bool act) const {
  std::size_t n = g.n;
  Tensor ones_row = Tensor::full({1, n}, 1.0);
  Tensor ones_col = Tensor::full({n, 1}, 1.0);
  // -1e9 on non-edges saturates the softmax to ~0 there
  Tensor neg_big = scale(sub(g.attn_mask, Tensor::full({n, n}, 1.0)), -1e9);

  std::vector<Tensor> outs;
  Tensor accum;
  for (const auto& head : heads) {
    Tensor h = matmul(x, head.w);                       // [n, d]
    Tensor s_src = matmul(h, head.a_src);               // [n, 1]
    Tensor s_dst = matmul(h, head.a_dst);               // [n, 1]
    Tensor e = leaky_relu(
        add(matmul(s_src, ones_row), matmul(ones_col, transpose(s_dst))));
    Tensor att = softmax_rows(sub(mul(e, g.attn_mask), neg_big));
    Tensor out = matmul(att, h);                        // [n, d]
    if (concat) {
      outs.push_back(out);
    } else {
      accum = accum.defined() ? add(accum, out) : out;
    }
  }
  Tensor merged;
  if (concat) {
    merged = outs[0];
    for (std::size_t i = 1; i < outs.size(); ++i)
      merged = concat_cols(merged, outs[i]);
  } else {
    merged = scale(accum, 1.0 / static_cast<double>(heads.size()));
  }
  return act ? gelu(merged) : merged;
}

Params GatLayer::params(const std::string& prefix) const {
  Params p;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    std::string hp = prefix + ".h" + std::to_string(h);
    p.emplace_back(hp + ".w", heads[h].w);
    p.emplace_back(hp + ".a_src", heads[h].a_src);
    p.emplace_back(hp + ".a_dst", heads[h].a_dst);
  }
  return p;
}

// ---- GraphSAGE ----

SageLayer::SageLayer(std::size_t d_in, std::size_t d_out, std::mt19937_64& rng)
    : w(xavier_uniform(2 * d_in, d_out, rng)),
      b(Tensor::zeros({1, d_out}, true)) {}

Tensor SageLayer::forward(const GraphContext& g, const Tensor& x,
                          bool act) const {
  Tensor agg = matmul(g.neighbor_mean, x);  // zero row when no neighbors
  Tensor h = add(matmul(concat_cols(x, agg), w), b);
  return act ? gelu(h) : h;
}

Params SageLayer::params(const std::string& prefix) const {
  return {{prefix + ".w", w}, {prefix + ".b", b}};
}

}  // namespace vulngraph::encoders
