#include "vulngraph/encoders/encoder.hpp"

#include "vulngraph/common/error.hpp"
#include "vulngraph/encoders/featurize.hpp"

namespace vulngraph::encoders {

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::Gcn: return "gcn";
    case EncoderKind::Gat: return "gat";
    case EncoderKind::Sage: return "sage";
    case EncoderKind::Node2Vec: return "node2vec";
  }
  return "gcn";
}

EncoderKind encoder_kind_from_string(std::string_view s) {
  if (s == "gcn") return EncoderKind::Gcn;
  if (s == "gat") return EncoderKind::Gat;
  if (s == "sage") return EncoderKind::Sage;
  if (s == "node2vec") return EncoderKind::Node2Vec;
  throw ConfigError("unknown encoder kind '" + std::string(s) + "'");
}

GraphEncoder::GraphEncoder(const EncoderConfig& config) : config_(config) {
  if (config_.layers == 0) throw ConfigError("encoder needs >= 1 layer");
  std::mt19937_64 rng(config_.seed);
  auto dim_at = [&](std::size_t layer) {
    return layer == 0 ? config_.d_in : config_.hidden;
  };
  switch (config_.kind) {
    case EncoderKind::Gcn:
      for (std::size_t l = 0; l < config_.layers; ++l)
        gcn_.emplace_back(dim_at(l),
                          l + 1 == config_.layers ? config_.d_out
                                                  : config_.hidden,
                          rng);
      break;
    case EncoderKind::Gat: {
      if (config_.hidden % config_.heads || config_.d_out % config_.heads)
        throw ConfigError("gat: head count must divide hidden and d_out");
      for (std::size_t l = 0; l < config_.layers; ++l) {
        bool last = l + 1 == config_.layers;
        std::size_t out = last ? config_.d_out : config_.hidden;
        // hidden layers concat heads; the output layer averages them
        gat_.emplace_back(dim_at(l), last ? out : out / config_.heads,
                          config_.heads, !last, rng);
      }
      break;
    }
    case EncoderKind::Sage:
      for (std::size_t l = 0; l < config_.layers; ++l)
        sage_.emplace_back(dim_at(l),
                           l + 1 == config_.layers ? config_.d_out
                                                   : config_.hidden,
                           rng);
      break;
    case EncoderKind::Node2Vec:
      break;  // frozen, nothing trainable
  }
}

PreparedGraph GraphEncoder::prepare(const javacfg::Cfg& cfg) const {
  PreparedGraph g;
  g.edges = cfg.edges;
  graph::GraphMatrices m = graph::build_matrices(cfg.nodes.size(), cfg.edges);
  g.ctx = make_graph_context(m, featurize(cfg, config_.d_in));
  if (config_.kind == EncoderKind::Node2Vec) {
    Node2VecConfig nc;
    nc.dim = config_.d_out;
    nc.seed = config_.seed;
    g.n2v = node2vec_embed(cfg.nodes.size(), cfg.edges, nc);
  }
  return g;
}

Tensor GraphEncoder::encode_nodes(const PreparedGraph& g) const {
  switch (config_.kind) {
    case EncoderKind::Gcn: {
      Tensor h = g.ctx.features;
      for (std::size_t l = 0; l < gcn_.size(); ++l)
        h = gcn_[l].forward(g.ctx, h, l + 1 < gcn_.size());
      return h;
    }
    case EncoderKind::Gat: {
      Tensor h = g.ctx.features;
      for (std::size_t l = 0; l < gat_.size(); ++l)
        h = gat_[l].forward(g.ctx, h, l + 1 < gat_.size());
      return h;
    }
    case EncoderKind::Sage: {
      Tensor h = g.ctx.features;
      for (std::size_t l = 0; l < sage_.size(); ++l)
        h = sage_[l].forward(g.ctx, h, l + 1 < sage_.size());
      return h;
    }
    case EncoderKind::Node2Vec:
      return g.n2v;
  }
  throw ConfigError("unreachable encoder kind");
}

Tensor GraphEncoder::encode(const PreparedGraph& g) const {
  return tensor::mean_rows(encode_nodes(g));
}

Params GraphEncoder::params() const {
  Params p;
  for (std::size_t l = 0; l < gcn_.size(); ++l) {
    Params lp = gcn_[l].params("gcn" + std::to_string(l));
    p.insert(p.end(), lp.begin(), lp.end());
  }
  for (std::size_t l = 0; l < gat_.size(); ++l) {
    Params lp = gat_[l].params("gat" + std::to_string(l));
    p.insert(p.end(), lp.begin(), lp.end());
  }
  for (std::size_t l = 0; l < sage_.size(); ++l) {
    Params lp = sage_[l].params("sage" + std::to_string(l));
    p.insert(p.end(), lp.begin(), lp.end());
  }
  return p;
}

}  // namespace vulngraph::encoders
