#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "vulngraph/encoders/layers.hpp"
#include "vulngraph/encoders/node2vec.hpp"
#include "vulngraph/javacfg/cfg.hpp"

namespace vulngraph::encoders {

enum class EncoderKind { Gcn, Gat, Sage, Node2Vec };

std::string_view to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(std::string_view s);  // ConfigError

struct EncoderConfig {
  EncoderKind kind = EncoderKind::Gcn;
  std::size_t d_in = 64;    // node feature width
  std::size_t hidden = 64;
  std::size_t d_out = 128;  // graph embedding width d_G
  std::size_t layers = 2;
  std::size_t heads = 4;    // GAT only; d_out must divide by heads
  std::uint64_t seed = 0;
};

/// Everything precomputed for one CFG: matrices-derived constants plus
/// (for the node2vec encoder) frozen node embeddings.
struct PreparedGraph {
  GraphContext ctx;
  Tensor n2v;  // defined only for EncoderKind::Node2Vec
  std::vector<graph::Edge> edges;  // directed CFG edges (for L_lap)
};

/// Trainable graph-side encoder. encode_nodes yields [n, d_out] node
/// states, encode mean-pools them to [1, d_out]. The node2vec variant
/// has no trainable parameters (embeddings stay frozen).
class GraphEncoder {
 public:
  explicit GraphEncoder(const EncoderConfig& config);

  PreparedGraph prepare(const javacfg::Cfg& cfg) const;

  Tensor encode_nodes(const PreparedGraph& g) const;
  Tensor encode(const PreparedGraph& g) const;  // mean pooled

  Params params() const;
  const EncoderConfig& config() const { return config_; }

 private:
  EncoderConfig config_;
  std::vector<GcnLayer> gcn_;
  std::vector<GatLayer> gat_;
  std::vector<SageLayer> sage_;
};

}  // namespace vulngraph::encoders
