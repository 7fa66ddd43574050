#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vulngraph/encoders/layers.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::fusion {

using encoders::Params;
using tensor::Tensor;

enum class FusionKind { Concat, Gating, CrossAttention };
std::string_view to_string(FusionKind k);
FusionKind fusion_kind_from_string(std::string_view s);  // ConfigError

enum class Activation { Gelu, Relu };
std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);  // ConfigError

/// How cross-attention output feeds the classifier: `Replace` uses F
/// alone, `Residual` concatenates [F ‖ l_hat].
enum class CombineMode { Replace, Residual };
std::string_view to_string(CombineMode m);
CombineMode combine_mode_from_string(std::string_view s);  // ConfigError

/// Gate override used by ablations: GraphOnly pins (a_g, a_l) = (1, 0)
/// so the fused vector equals g_hat bit for bit; SemanticsOnly is the
/// mirror image.
enum class GateMode { Learned, GraphOnly, SemanticsOnly };

struct FusionConfig {
  FusionKind kind = FusionKind::Gating;
  std::size_t d_graph = 128;  // encoder output width
  std::size_t d_lang = 256;   // provider embedding width
  std::size_t d_proj = 128;   // shared space width
  Activation activation = Activation::Gelu;
  CombineMode combine = CombineMode::Residual;
  std::vector<std::size_t> mlp_hidden = {64};  // empty -> pure linear head
  bool force_concat_classifier = false;  // classify on [g_hat ‖ l_hat] always
  std::uint64_t seed = 0;
};

/// x -> LayerNorm(phi(W x + b)), with the input L2-normalized first.
struct ProjectionHead {
  Tensor w, b, gamma, beta;
  Activation act = Activation::Gelu;

  ProjectionHead() = default;
  ProjectionHead(std::size_t d_in, std::size_t d_out, Activation act,
                 std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void collect(Params& out, const std::string& prefix) const;
};

/// Two-way soft gate. Both scores share the scoring vector v; they
/// differ only in concatenation order and affine parameters.
struct GatingHead {
  Tensor w_e, b_e;    // scores [g_hat ‖ l_hat]
  Tensor w_e2, b_e2;  // scores [l_hat ‖ g_hat]
  Tensor v;

  GatingHead(std::size_t d, std::mt19937_64& rng);
  Tensor scores(const Tensor& g_hat, const Tensor& l_hat) const;  // [N,2]
  // -> (h, gate [N,2]); gate columns are (a_g, a_l) and sum to 1
  std::pair<Tensor, Tensor> fuse(const Tensor& g_hat, const Tensor& l_hat,
                                 GateMode mode) const;
  void collect(Params& out, const std::string& prefix) const;
};

/// Scaled dot-product attention with a single query row per sample.
struct CrossAttentionHead {
  Tensor w_q, w_k, w_v;
  std::size_t d_k;

  CrossAttentionHead(std::size_t d, std::size_t d_k, std::mt19937_64& rng);
  // query [1,d'] attends over keys/values [n,d'] -> [1,d_k]
  Tensor attend(const Tensor& query, const Tensor& keys_values) const;
  void collect(Params& out, const std::string& prefix) const;
};

struct Classifier {
  std::vector<std::pair<Tensor, Tensor>> layers;  // (w, b), output last
  Activation act = Activation::Gelu;

  Classifier() = default;
  Classifier(std::size_t d_in, const std::vector<std::size_t>& hidden,
             Activation act, std::mt19937_64& rng);
  Tensor logits(const Tensor& u) const;  // [N,d_in] -> [N,1]
  void collect(Params& out, const std::string& prefix) const;
};

Tensor fuse_concat(const Tensor& g_hat, const Tensor& l_hat);

struct FusedBatch {
  Tensor logits;  // [N,1]
  Tensor prob;    // [N,1], sigmoid of logits
  Tensor fused;   // classifier input u
  Tensor g_hat;   // [N,d']
  Tensor l_hat;   // [N,d']
  Tensor gate;    // [N,2] (a_g, a_l); defined only in gating mode
};

class FusionModel {
 public:
  explicit FusionModel(const FusionConfig& config);

  /// h_graph: pooled graph embeddings [N,d_graph]; h_lang: provider
  /// embeddings [N,d_lang]. Cross-attention additionally needs each
  /// sample's node-level encoder outputs ([n_i, d_graph]) as
  /// keys/values; other kinds ignore graph_nodes.
  FusedBatch forward(const Tensor& h_graph, const Tensor& h_lang,
                     GateMode gate_mode = GateMode::Learned,
                     const std::vector<Tensor>& graph_nodes = {}) const;

  /// Same as forward() but starting from already-projected inputs;
  /// ablations use this to substitute a zeroed g_hat, and training
  /// reuses node projections shared with the Laplacian term.
  FusedBatch forward_projected(
      const Tensor& g_hat, const Tensor& l_hat,
      GateMode gate_mode = GateMode::Learned,
      const std::vector<Tensor>& projected_nodes = {}) const;

  std::pair<Tensor, Tensor> project(const Tensor& h_graph,
                                    const Tensor& h_lang) const;

  Params params() const;
  const FusionConfig& config() const { return config_; }
  const ProjectionHead& graph_head() const { return proj_g_; }
  const ProjectionHead& lang_head() const { return proj_l_; }
  GatingHead& gating();                  // ConfigError if kind != Gating
  CrossAttentionHead& cross_attention(); // ConfigError if kind != CrossAttention
  Classifier& classifier() { return clf_; }

 private:
  std::size_t classifier_input_dim() const;

  FusionConfig config_;
  ProjectionHead proj_g_;
  ProjectionHead proj_l_;
  std::vector<GatingHead> gate_;            // 0 or 1
  std::vector<CrossAttentionHead> cross_;   // 0 or 1
  Classifier clf_;
};

}  // namespace vulngraph::fusion
