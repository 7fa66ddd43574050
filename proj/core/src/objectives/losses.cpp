#include "vulngraph/objectives/losses.hpp"

#include <cmath>

#include "vulngraph/common/error.hpp"

namespace vulngraph::objectives {

void LossConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("InfoNCE temperature must be positive and finite");
  }
  if (lambda_nce < 0.0 || !std::isfinite(lambda_nce) || lambda_lap < 0.0 ||
      !std::isfinite(lambda_lap)) {
    throw ConfigError("loss weights must be nonnegative and finite");
  }
  if (pos_weight < 0.0 || !std::isfinite(pos_weight)) {
    throw ConfigError("positive-class weight must be nonnegative and finite");
  }
}

Tensor bce(const Tensor& logits, const std::vector<double>& labels,
           double pos_weight) {
  return bce_with_logits(logits, labels, pos_weight);
}

Tensor info_nce_from_sims(const Tensor& sims, double tau) {
  if (!(tau > 0.0)) throw DomainError("InfoNCE temperature must be positive");
  const std::size_t n = sims.rows();
  const Tensor scaled = scale(sims, 1.0 / tau);
  const Tensor lse = logsumexp_rows(scaled);  // [N,1]

  Tensor eye = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) eye.mutable_data()[i * n + i] = 1.0;
  const Tensor diag = sum_rows(mul(scaled, eye));  // [N,1]

  return scale(sum(sub(lse, diag)), 1.0 / static_cast<double>(n));
}

Tensor info_nce(const Tensor& g_hat, const Tensor& l_hat, double tau) {
  const Tensor g = l2_normalize_rows(g_hat);
  const Tensor l = l2_normalize_rows(l_hat);
  return info_nce_from_sims(matmul(g, transpose(l)), tau);
}

Tensor laplacian_reg(const std::vector<Tensor>& node_embeddings,
                     const std::vector<std::vector<graph::Edge>>& edges) {
  if (node_embeddings.size() != edges.size()) {
    throw DomainError("laplacian_reg: one edge list per embedding matrix");
  }
  const std::size_t m = node_embeddings.size();
  if (m == 0) return Tensor::scalar(0.0);

  Tensor acc;
  for (std::size_t i = 0; i < m; ++i) {
    if (edges[i].empty()) continue;
    std::vector<std::size_t> us, vs;
    us.reserve(edges[i].size());
    vs.reserve(edges[i].size());
    for (const auto& [u, v] : edges[i]) {
      us.push_back(u);
      vs.push_back(v);
    }
    const Tensor d = sub(gather_rows(node_embeddings[i], std::move(us)),
                         gather_rows(node_embeddings[i], std::move(vs)));
    const Tensor graph_sum = sum(mul(d, d));
    acc = acc.defined() ? add(acc, graph_sum) : graph_sum;
  }
  if (!acc.defined()) return Tensor::scalar(0.0);
  return scale(acc, 1.0 / static_cast<double>(m));
}

Tensor total_loss(const LossParts& parts, const LossConfig& config) {
  config.validate();
  if (!parts.cls.defined()) {
    throw DomainError("total_loss needs a classification term");
  }
  Tensor out = parts.cls;
  if (parts.nce.defined()) out = add(out, scale(parts.nce, config.lambda_nce));
  if (parts.lap.defined()) out = add(out, scale(parts.lap, config.lambda_lap));
  return out;
}

}  // namespace vulngraph::objectives
