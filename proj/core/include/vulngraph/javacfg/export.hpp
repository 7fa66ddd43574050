#pragma once

#include <string>
#include <string_view>

#include "vulngraph/javacfg/cfg.hpp"

namespace vulngraph::javacfg {

/// Serializes one CFG per digraph. Node lines carry label and kind
/// attributes; ids are the graph-local dense ids.
std::string to_dot(const Cfg& cfg);

/// Parses a digraph produced by to_dot (not arbitrary Graphviz).
/// Throws ParseError with line information on malformed input.
Cfg from_dot(std::string_view dot);

/// {"method":..., "nodes":[{"id","kind","label"}...], "edges":[[a,b]...]}
std::string to_json(const Cfg& cfg);
Cfg from_json(std::string_view json_text);

}  // namespace vulngraph::javacfg
