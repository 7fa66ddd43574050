#include "vulngraph/fusion/fusion.hpp"

#include <cmath>

#include "vulngraph/common/error.hpp"
#include "vulngraph/tensor/init.hpp"

namespace vulngraph::fusion {

std::string_view to_string(FusionKind k) {
  switch (k) {
    case FusionKind::Concat: return "concat";
    case FusionKind::Gating: return "gating";
    case FusionKind::CrossAttention: return "cross_attention";
  }
  return "gating";
}

FusionKind fusion_kind_from_string(std::string_view s) {
  if (s == "concat") return FusionKind::Concat;
  if (s == "gating") return FusionKind::Gating;
  if (s == "cross_attention") return FusionKind::CrossAttention;
  throw ConfigError("unknown fusion kind: " + std::string(s));
}

std::string_view to_string(Activation a) {
  return a == Activation::Gelu ? "gelu" : "relu";
}

Activation activation_from_string(std::string_view s) {
  if (s == "gelu") return Activation::Gelu;
  if (s == "relu") return Activation::Relu;
  throw ConfigError("unknown activation: " + std::string(s));
}

std::string_view to_string(CombineMode m) {
  return m == CombineMode::Replace ? "replace" : "residual";
}

CombineMode combine_mode_from_string(std::string_view s) {
  if (s == "replace") return CombineMode::Replace;
  if (s == "residual") return CombineMode::Residual;
  throw ConfigError("unknown combine mode: " + std::string(s));
}

namespace {

Tensor zeros_row(std::size_t d) { return Tensor::zeros({1, d}, true); }

Tensor ones_row(std::size_t d) { return Tensor::full({1, d}, 1.0, true); }

Tensor apply_act(Activation act, const Tensor& x) {
  return act == Activation::Gelu ? gelu(x) : relu(x);
}

}  // namespace

ProjectionHead::ProjectionHead(std::size_t d_in, std::size_t d_out,
                               Activation act, std::mt19937_64& rng)
    : w(tensor::xavier_uniform(d_in, d_out, rng)),
      b(zeros_row(d_out)),
      gamma(ones_row(d_out)),
      beta(zeros_row(d_out)),
      act(act) {}

Tensor ProjectionHead::forward(const Tensor& x) const {
  const Tensor normalized = l2_normalize_rows(x);
  const Tensor lin = add(matmul(normalized, w), b);
  return layer_norm_rows(apply_act(act, lin), gamma, beta);
}

void ProjectionHead::collect(Params& out, const std::string& prefix) const {
  out.emplace_back(prefix + ".w", w);
  out.emplace_back(prefix + ".b", b);
  out.emplace_back(prefix + ".gamma", gamma);
  out.emplace_back(prefix + ".beta", beta);
}

GatingHead::GatingHead(std::size_t d, std::mt19937_64& rng)
    : w_e(tensor::xavier_uniform(2 * d, d, rng)),
      b_e(zeros_row(d)),
      w_e2(tensor::xavier_uniform(2 * d, d, rng)),
      b_e2(zeros_row(d)),
      v(tensor::xavier_uniform(d, 1, rng)) {}

Tensor GatingHead::scores(const Tensor& g_hat, const Tensor& l_hat) const {
  const Tensor gl = concat_cols(g_hat, l_hat);
  const Tensor lg = concat_cols(l_hat, g_hat);
  const Tensor e_g = matmul(tanh_op(add(matmul(gl, w_e), b_e)), v);
  const Tensor e_l = matmul(tanh_op(add(matmul(lg, w_e2), b_e2)), v);
  return concat_cols(e_g, e_l);  // [N,2]
}

std::pair<Tensor, Tensor> GatingHead::fuse(const Tensor& g_hat,
                                           const Tensor& l_hat,
                                           GateMode mode) const {
  Tensor gate;
  if (mode == GateMode::Learned) {
    gate = softmax_pair(scores(g_hat, l_hat));
  } else {
    // pinned gate: exact 1/0 weights, detached from the tape
    const std::size_t n = g_hat.rows();
    Tensor pinned = Tensor::zeros({n, 2});
    const double a_g = mode == GateMode::GraphOnly ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pinned.mutable_data()[2 * i] = a_g;
      pinned.mutable_data()[2 * i + 1] = 1.0 - a_g;
    }
    gate = pinned;
  }
  const Tensor a_g = slice_cols(gate, 0, 1);
  const Tensor a_l = slice_cols(gate, 1, 2);
  const Tensor h = add(scale_rows(g_hat, a_g), scale_rows(l_hat, a_l));
  return {h, gate};
}

void GatingHead::collect(Params& out, const std::string& prefix) const {
  out.emplace_back(prefix + ".w_e", w_e);
  out.emplace_back(prefix + ".b_e", b_e);
  out.emplace_back(prefix + ".w_e2", w_e2);
  out.emplace_back(prefix + ".b_e2", b_e2);
  out.emplace_back(prefix + ".v", v);
}

CrossAttentionHead::CrossAttentionHead(std::size_t d, std::size_t d_k,
                                       std::mt19937_64& rng)
    : w_q(tensor::xavier_uniform(d, d_k, rng)),
      w_k(tensor::xavier_uniform(d, d_k, rng)),
      w_v(tensor::xavier_uniform(d, d_k, rng)),
      d_k(d_k) {}

Tensor CrossAttentionHead::attend(const Tensor& query,
                                  const Tensor& keys_values) const {
  const Tensor q = matmul(query, w_q);        // [1,d_k]
  const Tensor k = matmul(keys_values, w_k);  // [n,d_k]
  const Tensor v = matmul(keys_values, w_v);  // [n,d_k]
  const Tensor logits =
      scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d_k)));
  const Tensor alpha = softmax_rows(logits);  // [1,n]
  return matmul(alpha, v);                    // [1,d_k]
}

void CrossAttentionHead::collect(Params& out, const std::string& prefix) const {
  out.emplace_back(prefix + ".w_q", w_q);
  out.emplace_back(prefix + ".w_k", w_k);
  out.emplace_back(prefix + ".w_v", w_v);
}

Classifier::Classifier(std::size_t d_in, const std::vector<std::size_t>& hidden,
                       Activation act, std::mt19937_64& rng)
    : act(act) {
  std::size_t cur = d_in;
  for (std::size_t width : hidden) {
    layers.emplace_back(tensor::xavier_uniform(cur, width, rng), zeros_row(width));
    cur = width;
  }
  layers.emplace_back(tensor::xavier_uniform(cur, 1, rng), zeros_row(1));
}

Tensor Classifier::logits(const Tensor& u) const {
  Tensor x = u;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    x = apply_act(act, add(matmul(x, layers[i].first), layers[i].second));
  }
  return add(matmul(x, layers.back().first), layers.back().second);
}

void Classifier::collect(Params& out, const std::string& prefix) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string name =
        i + 1 == layers.size() ? prefix + ".out" : prefix + "." + std::to_string(i);
    out.emplace_back(name + ".w", layers[i].first);
    out.emplace_back(name + ".b", layers[i].second);
  }
}

Tensor fuse_concat(const Tensor& g_hat, const Tensor& l_hat) {
  return concat_cols(g_hat, l_hat);
}

FusionModel::FusionModel(const FusionConfig& config) : config_(config) {
  if (config_.d_proj == 0 || config_.d_graph == 0 || config_.d_lang == 0) {
    throw ConfigError("fusion dimensions must be positive");
  }
  std::mt19937_64 rng(config_.seed);
  proj_g_ = ProjectionHead(config_.d_graph, config_.d_proj,
                           config_.activation, rng);
  proj_l_ = ProjectionHead(config_.d_lang, config_.d_proj, config_.activation,
                           rng);
  if (config_.kind == FusionKind::Gating) {
    gate_.emplace_back(config_.d_proj, rng);
  } else if (config_.kind == FusionKind::CrossAttention) {
    cross_.emplace_back(config_.d_proj, config_.d_proj, rng);
  }
  clf_ = Classifier(classifier_input_dim(), config_.mlp_hidden,
                    config_.activation, rng);
}

std::size_t FusionModel::classifier_input_dim() const {
  if (config_.force_concat_classifier) return 2 * config_.d_proj;
  switch (config_.kind) {
    case FusionKind::Concat: return 2 * config_.d_proj;
    case FusionKind::Gating: return config_.d_proj;
    case FusionKind::CrossAttention:
      return config_.combine == CombineMode::Residual ? 2 * config_.d_proj
                                                      : config_.d_proj;
  }
  return config_.d_proj;
}

std::pair<Tensor, Tensor> FusionModel::project(const Tensor& h_graph,
                                               const Tensor& h_lang) const {
  if (h_graph.cols() != config_.d_graph) {
    throw ShapeMismatchError(
        "fusion graph input",
        tensor::shape_to_string({h_graph.rows(), config_.d_graph}),
        tensor::shape_to_string(h_graph.shape()));
  }
  if (h_lang.cols() != config_.d_lang) {
    throw ShapeMismatchError("fusion language input",
                             tensor::shape_to_string({h_lang.rows(), config_.d_lang}),
                             tensor::shape_to_string(h_lang.shape()));
  }
  return {proj_g_.forward(h_graph), proj_l_.forward(h_lang)};
}

FusedBatch FusionModel::forward(const Tensor& h_graph, const Tensor& h_lang,
                                GateMode gate_mode,
                                const std::vector<Tensor>& graph_nodes) const {
  auto [g_hat, l_hat] = project(h_graph, h_lang);
  std::vector<Tensor> projected_nodes;
  if (config_.kind == FusionKind::CrossAttention) {
    projected_nodes.reserve(graph_nodes.size());
    for (const Tensor& nodes : graph_nodes) {
      projected_nodes.push_back(proj_g_.forward(nodes));
    }
  }
  return forward_projected(g_hat, l_hat, gate_mode, projected_nodes);
}

FusedBatch FusionModel::forward_projected(
    const Tensor& g_hat, const Tensor& l_hat, GateMode gate_mode,
    const std::vector<Tensor>& projected_nodes) const {
  FusedBatch out;
  out.g_hat = g_hat;
  out.l_hat = l_hat;

  Tensor u;
  switch (config_.kind) {
    case FusionKind::Concat:
      u = fuse_concat(g_hat, l_hat);
      break;
    case FusionKind::Gating: {
      auto [h, gate] = gate_.front().fuse(g_hat, l_hat, gate_mode);
      out.gate = gate;
      u = h;
      break;
    }
    case FusionKind::CrossAttention: {
      if (projected_nodes.size() != g_hat.rows()) {
        throw ConfigError(
            "cross-attention fusion needs node-level embeddings for every "
            "sample");
      }
      std::vector<Tensor> per_sample;
      per_sample.reserve(projected_nodes.size());
      for (std::size_t i = 0; i < projected_nodes.size(); ++i) {
        const Tensor query = slice_rows(l_hat, i, i + 1);
        per_sample.push_back(cross_.front().attend(query, projected_nodes[i]));
      }
      const Tensor f = concat_rows(per_sample);  // [N,d_k]
      u = config_.combine == CombineMode::Residual ? concat_cols(f, l_hat) : f;
      break;
    }
  }
  if (config_.force_concat_classifier) u = fuse_concat(g_hat, l_hat);

  out.fused = u;
  out.logits = clf_.logits(u);
  out.prob = sigmoid(out.logits);
  return out;
}

Params FusionModel::params() const {
  Params out;
  proj_g_.collect(out, "proj.g");
  proj_l_.collect(out, "proj.l");
  if (!gate_.empty()) gate_.front().collect(out, "gate");
  if (!cross_.empty()) cross_.front().collect(out, "cross");
  clf_.collect(out, "clf");
  return out;
}

GatingHead& FusionModel::gating() {
  if (gate_.empty()) throw ConfigError("model has no gating head");
  return gate_.front();
}

CrossAttentionHead& FusionModel::cross_attention() {
  if (cross_.empty()) throw ConfigError("model has no cross-attention head");
  return cross_.front();
}

}  // namespace vulngraph::fusion
