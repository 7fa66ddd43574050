#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vulngraph/javacfg/ast.hpp"

namespace vulngraph::javacfg {

/// Node kinds, also the one-hot vocabulary used by the featurizer.
enum class NodeKind {
  Entry = 0,
  Exit = 1,
  Statement = 2,
  Branch = 3,
  Loop = 4,
  Switch = 5,
  Try = 6,
  Catch = 7,
  Return = 8,  // return and throw both terminate to exit
};
inline constexpr std::size_t kNodeKindCount = 9;

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view s);  // throws ParseError

struct CfgNode {
  std::size_t id = 0;
  NodeKind kind = NodeKind::Statement;
  std::string label;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// One method's control-flow graph. Invariants: node ids are dense
/// 0..n-1 in vector order; entry is id 0; exit is the last id; edges
/// are deduplicated and sorted by (src, dst); every non-exit node that
/// survives pruning is reachable from entry.
struct Cfg {
  std::string method_name;
  std::vector<CfgNode> nodes;
  std::vector<Edge> edges;

  std::size_t entry_id() const { return 0; }
  std::size_t exit_id() const { return nodes.size() - 1; }
};

inline constexpr std::size_t kMaxLabelLength = 120;

/// Builds the statement-level CFG for a parsed method.
Cfg build_cfg(const Method& method);

struct CfgStats {
  std::size_t methods = 0;
  std::size_t total_nodes = 0;
  std::size_t total_edges = 0;
  std::size_t max_nodes = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
};

CfgStats compute_stats(const std::vector<Cfg>& cfgs);

}  // namespace vulngraph::javacfg
