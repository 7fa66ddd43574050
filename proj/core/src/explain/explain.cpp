#include "vulngraph/explain/explain.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "vulngraph/common/error.hpp"

namespace vulngraph::explain {

using nlohmann::json;

std::string_view to_string(SaliencyMethod m) {
  return m == SaliencyMethod::InputGradient ? "input-gradient"
                                            : "integrated-gradients";
}

SaliencyMethod saliency_method_from_string(std::string_view s) {
  if (s == "input-gradient") return SaliencyMethod::InputGradient;
  if (s == "integrated-gradients") return SaliencyMethod::IntegratedGradients;
  throw ConfigError("unknown saliency method '" + std::string(s) + "'");
}

namespace {

fusion::FusedBatch forward_one(const pipeline::VulnModel& model,
                               const pipeline::PreparedSample& sample,
                               const encoders::PreparedGraph& graph) {
  const auto& fcfg = model.fusion.config();
  Tensor l_hat;
  if (model.zero_semantics) {
    l_hat = Tensor::zeros({1, fcfg.d_proj});
  } else {
    l_hat = model.fusion.lang_head().forward(Tensor::row(sample.lang));
  }
  Tensor g_hat;
  std::vector<Tensor> projected;
  if (model.zero_graph) {
    g_hat = Tensor::zeros({1, fcfg.d_proj});
  } else {
    const Tensor nodes = model.encoder.encode_nodes(graph);
    g_hat = model.fusion.graph_head().forward(mean_rows(nodes));
    if (fcfg.kind == fusion::FusionKind::CrossAttention) {
      projected.push_back(model.fusion.graph_head().forward(nodes));
    }
  }
  return model.fusion.forward_projected(g_hat, l_hat, model.gate_mode(),
                                        projected);
}

// The tensor the encoder actually consumes: frozen node2vec rows for
// that encoder kind, featurized node labels otherwise.
const Tensor& encoder_input(const pipeline::VulnModel& model,
                            const encoders::PreparedGraph& graph) {
  return model.encoder.config().kind == encoders::EncoderKind::Node2Vec
             ? graph.n2v
             : graph.ctx.features;
}

encoders::PreparedGraph with_input(const pipeline::VulnModel& model,
                                   const encoders::PreparedGraph& graph,
                                   Tensor input) {
  encoders::PreparedGraph out = graph;
  if (model.encoder.config().kind == encoders::EncoderKind::Node2Vec) {
    out.n2v = std::move(input);
  } else {
    out.ctx.features = std::move(input);
  }
  return out;
}

// f(X): the scalar the saliency differentiates, for a fixed class.
Tensor target_of(const fusion::FusedBatch& fused, int predicted, bool logit) {
  if (logit) {
    return predicted == 1 ? fused.logits : neg(fused.logits);
  }
  return predicted == 1 ? fused.prob
                        : sub(Tensor::full({1, 1}, 1.0), fused.prob);
}

// grad() is empty when the target never touched the leaf
std::vector<double> grad_or_zero(const Tensor& leaf) {
  const auto g = leaf.grad();
  if (g.empty()) return std::vector<double>(leaf.size(), 0.0);
  return std::vector<double>(g.begin(), g.end());
}

std::vector<NodeImportance> top_k(const javacfg::Cfg& cfg,
                                  const std::vector<double>& scores,
                                  std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return scores[a] > scores[b];  // stable keeps id order on ties
  });
  std::vector<NodeImportance> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    out.push_back({order[i], cfg.nodes[order[i]].label, scores[order[i]]});
  }
  return out;
}

std::string fixed6(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << v;
  return out.str();
}

}  // namespace

SaliencyResult saliency(const pipeline::VulnModel& model,
                        const pipeline::PreparedSample& sample,
                        const SaliencyOptions& options) {
  const Tensor& input = encoder_input(model, sample.graph);
  const std::size_t n = sample.cfg.nodes.size();
  const std::size_t dim = input.cols();
  if (input.rows() != n) {
    throw ShapeMismatchError("saliency input", std::to_string(n) + " rows",
                             std::to_string(input.rows()) + " rows");
  }
  const std::vector<double> x(input.data().begin(), input.data().end());

  SaliencyResult result;
  const auto base = forward_one(model, sample, sample.graph);
  result.y_hat = base.prob.at(0, 0);
  result.predicted = result.y_hat >= 0.5 ? 1 : 0;
  result.node_scores.assign(n, 0.0);

  if (options.method == SaliencyMethod::InputGradient) {
    Tensor leaf = Tensor::from_data({n, dim}, x, true);
    auto fused = forward_one(model, sample, with_input(model, sample.graph, leaf));
    target_of(fused, result.predicted, options.target_logit).backward();
    const auto g = grad_or_zero(leaf);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t d = 0; d < dim; ++d) {
        result.node_scores[v] += std::abs(g[v * dim + d]);
      }
    }
  } else {
    const std::size_t m = options.steps == 0 ? 1 : options.steps;
    std::vector<double> avg_grad(n * dim, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double alpha =
          (static_cast<double>(k) + 0.5) / static_cast<double>(m);
      std::vector<double> scaled(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = alpha * x[i];
      Tensor leaf = Tensor::from_data({n, dim}, std::move(scaled), true);
      auto fused =
          forward_one(model, sample, with_input(model, sample.graph, leaf));
      target_of(fused, result.predicted, options.target_logit).backward();
      const auto g = grad_or_zero(leaf);
      for (std::size_t i = 0; i < g.size(); ++i) avg_grad[i] += g[i];
    }
    double signed_sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double attr =
            x[v * dim + d] * avg_grad[v * dim + d] / static_cast<double>(m);
        signed_sum += attr;
        result.node_scores[v] += std::abs(attr);
      }
    }
    // completeness: sum of attributions vs f(X) - f(X0)
    const Tensor zero = Tensor::zeros({n, dim});
    const auto at_zero =
        forward_one(model, sample, with_input(model, sample.graph, zero));
    const double f_x =
        target_of(base, result.predicted, options.target_logit).value();
    const double f_zero =
        target_of(at_zero, result.predicted, options.target_logit).value();
    result.completeness_gap = std::abs(signed_sum - (f_x - f_zero));
  }

  result.top_nodes = top_k(sample.cfg, result.node_scores, options.k);
  return result;
}

std::string build_prompt(const std::string& code, int predicted_class,
                         const std::vector<std::string>& top_node_labels) {
  std::string labels;
  for (std::size_t i = 0; i < top_node_labels.size(); ++i) {
    if (i > 0) labels += ", ";
    labels += top_node_labels[i];
  }
  std::string prompt = "One sentence: main reason this code is ";
  prompt += predicted_class == 1 ? "vulnerable" : "safe";
  prompt += ". Provide only one sentence.\nCode: ";
  prompt += code;
  prompt += "\nTop nodes: ";
  prompt += labels;
  prompt += "\nOne-sentence explanation:";
  return prompt;
}

namespace {

std::string first_sentence(const std::string& reply) {
  const auto begin = reply.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto stop = reply.find_first_of(".!?", begin);
  const auto end = stop == std::string::npos ? reply.size() : stop + 1;
  std::string out = reply.substr(begin, end - begin);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) {
    out.pop_back();
  }
  return out;
}

}  // namespace

Justification justify(const std::string& prompt,
                      semantic::SemanticProvider* provider,
                      const std::string& fallback_sentence) {
  if (provider == nullptr) return {fallback_sentence, true};
  try {
    const std::string sentence =
        first_sentence(provider->generate(prompt, 256, 0.0));
    if (sentence.empty()) return {fallback_sentence, true};
    return {sentence, false};
  } catch (const ProviderUnavailableError&) {
    return {fallback_sentence, true};
  }
}

ExplanationReport report(const pipeline::VulnModel& model,
                         const pipeline::PreparedSample& sample,
                         const SaliencyOptions& options,
                         semantic::SemanticProvider* provider) {
  const auto sal = saliency(model, sample, options);

  ExplanationReport r;
  r.sample_id = sample.sample_id;
  r.method_name = sample.method_name;
  r.predicted = sal.predicted;
  r.y_hat = sal.y_hat;
  r.saliency_method = options.method;
  r.top_nodes = sal.top_nodes;

  if (model.fusion.config().kind == fusion::FusionKind::Gating) {
    const auto fused = forward_one(model, sample, sample.graph);
    r.has_gates = true;
    r.a_g = fused.gate.at(0, 0);
    r.a_l = fused.gate.at(0, 1);
  }

  std::string modality = "combined";
  if (r.has_gates) modality = r.a_g >= r.a_l ? "graph" : "semantic";
  std::string ids;
  for (std::size_t i = 0; i < r.top_nodes.size(); ++i) {
    if (i > 0) ids += ", ";
    ids += std::to_string(r.top_nodes[i].node);
  }
  const std::string fallback =
      "Prediction driven by " + modality + " evidence at nodes " + ids + ".";

  std::vector<std::string> labels;
  for (const auto& tn : r.top_nodes) labels.push_back(tn.label);
  const auto j =
      justify(build_prompt(sample.source, r.predicted, labels), provider,
              fallback);
  r.justification = j.sentence;
  r.justification_fallback = j.fallback;
  return r;
}

std::string report_json(const ExplanationReport& r) {
  json j;
  j["version"] = 1;
  j["sample_id"] = r.sample_id;
  j["method"] = r.method_name;
  j["predicted"] = r.predicted;
  j["y_hat"] = r.y_hat;
  j["a_g"] = r.has_gates ? json(r.a_g) : json(nullptr);
  j["a_l"] = r.has_gates ? json(r.a_l) : json(nullptr);
  j["saliency_method"] = std::string(to_string(r.saliency_method));
  j["top_nodes"] = json::array();
  for (const auto& tn : r.top_nodes) {
    j["top_nodes"].push_back(
        {{"id", tn.node}, {"label", tn.label}, {"score", tn.score}});
  }
  j["justification"] = r.justification;
  j["justification_fallback"] = r.justification_fallback;
  return j.dump();
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot_marked(const javacfg::Cfg& cfg,
                          const std::vector<NodeImportance>& marked) {
  std::set<std::size_t> mark;
  for (const auto& m : marked) mark.insert(m.node);
  std::ostringstream os;
  os << "digraph \"" << dot_escape(cfg.method_name) << "\" {\n";
  os << "  rankdir=TB;\n";
  for (const auto& n : cfg.nodes) {
    os << "  " << n.id << " [label=\"" << dot_escape(n.label) << "\", kind=\""
       << to_string(n.kind) << "\"";
    if (mark.count(n.id)) os << ", style=\"filled\", fillcolor=\"lightcoral\"";
    os << "];\n";
  }
  for (const auto& [a, b] : cfg.edges) os << "  " << a << " -> " << b << ";\n";
  os << "}\n";
  return os.str();
}

void write_reports_csv(const std::vector<ExplanationReport>& reports,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write reports csv: " + path);
  out << "sample_id,method,predicted,y_hat,a_g,a_l,top_nodes\n";
  for (const auto& r : reports) {
    out << r.sample_id << ',' << r.method_name << ',' << r.predicted << ','
        << fixed6(r.y_hat) << ',';
    if (r.has_gates) {
      out << fixed6(r.a_g) << ',' << fixed6(r.a_l);
    } else {
      out << ',';
    }
    out << ',';
    for (std::size_t i = 0; i < r.top_nodes.size(); ++i) {
      if (i > 0) out << ';';
      out << r.top_nodes[i].node;
    }
    out << '\n';
  }
}

void write_gate_distribution_csv(const std::vector<ExplanationReport>& reports,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write gate csv: " + path);
  std::vector<std::size_t> hist(10, 0);
  double sum_g = 0.0, sum_l = 0.0;
  std::size_t gated = 0;
  for (const auto& r : reports) {
    if (!r.has_gates) continue;
    ++gated;
    sum_g += r.a_g;
    sum_l += r.a_l;
    auto bin = static_cast<std::size_t>(r.a_g * 10.0);
    ++hist[std::min<std::size_t>(bin, 9)];
  }
  out << "stat,value\n";
  out << "samples," << gated << '\n';
  out << "mean_a_g," << fixed6(gated ? sum_g / gated : 0.0) << '\n';
  out << "mean_a_l," << fixed6(gated ? sum_l / gated : 0.0) << '\n';
  for (std::size_t b = 0; b < hist.size(); ++b) {
    out << "bin_" << b << ',' << hist[b] << '\n';
  }
}

}  // namespace vulngraph::explain
