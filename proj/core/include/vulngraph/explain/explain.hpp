#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vulngraph/pipeline/train.hpp"
#include "vulngraph/semantic/provider.hpp"

namespace vulngraph::explain {

using tensor::Tensor;

enum class SaliencyMethod { InputGradient, IntegratedGradients };
std::string_view to_string(SaliencyMethod m);
SaliencyMethod saliency_method_from_string(std::string_view s);  // ConfigError

struct SaliencyOptions {
  SaliencyMethod method = SaliencyMethod::IntegratedGradients;
  std::size_t k = 5;        // clamped to |V|
  std::size_t steps = 128;  // integrated gradients only
  bool target_logit = false;  // default target: y-hat of the predicted class
};

struct NodeImportance {
  std::size_t node = 0;
  std::string label;
  double score = 0.0;
};

struct SaliencyResult {
  std::vector<NodeImportance> top_nodes;  // min(k, |V|), scores nonincreasing
  std::vector<double> node_scores;        // one per CFG node
  double y_hat = 0.0;
  int predicted = 0;
  // |sum of signed attributions - (f(X) - f(X0))|; integrated gradients only
  double completeness_gap = 0.0;
};

/// Gradient saliency over the tensor actually feeding the encoder
/// (node features; frozen embeddings for the node2vec encoder).
/// Input-gradient scores are sum_d |df/dX[v,d]|; integrated gradients
/// use an m-step midpoint Riemann sum from a zero baseline with
/// node scores sum_d |(X - X0)[v,d] * avggrad[v,d]|. Ties break toward
/// the smaller node id.
SaliencyResult saliency(const pipeline::VulnModel& model,
                        const pipeline::PreparedSample& sample,
                        const SaliencyOptions& options = {});

/// The strict justification prompt; class word is "vulnerable" when
/// predicted_class == 1, "safe" otherwise. Node labels join with ", "
/// in rank order.
std::string build_prompt(const std::string& code, int predicted_class,
                         const std::vector<std::string>& top_node_labels);

struct Justification {
  std::string sentence;
  bool fallback = false;  // provider missing or unavailable
};

/// Temperature-0 generation capped at 256 tokens, truncated at the
/// first sentence terminator. A null or unavailable provider yields
/// fallback_sentence with the flag set.
Justification justify(const std::string& prompt,
                      semantic::SemanticProvider* provider,
                      const std::string& fallback_sentence);

struct ExplanationReport {
  std::string sample_id;
  std::string method_name;
  int predicted = 0;
  double y_hat = 0.0;
  bool has_gates = false;  // gating fusion only
  double a_g = 0.0;
  double a_l = 0.0;
  SaliencyMethod saliency_method = SaliencyMethod::IntegratedGradients;
  std::vector<NodeImportance> top_nodes;
  std::string justification;
  bool justification_fallback = false;
};

ExplanationReport report(const pipeline::VulnModel& model,
                         const pipeline::PreparedSample& sample,
                         const SaliencyOptions& options = {},
                         semantic::SemanticProvider* provider = nullptr);

/// Versioned single-object schema (version 1). Gates serialize as null
/// for fusion kinds without them.
std::string report_json(const ExplanationReport& report);

/// to_dot output with the top-K nodes drawn style=filled.
std::string to_dot_marked(const javacfg::Cfg& cfg,
                          const std::vector<NodeImportance>& marked);

/// One row per report: sample, method, prediction, gates, top node ids.
void write_reports_csv(const std::vector<ExplanationReport>& reports,
                       const std::string& path);

/// Corpus gate distribution: mean a_g plus a 10-bin histogram.
void write_gate_distribution_csv(const std::vector<ExplanationReport>& reports,
                                 const std::string& path);

}  // namespace vulngraph::explain
