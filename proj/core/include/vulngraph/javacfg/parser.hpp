#pragma once

#include <string_view>
#include <vector>

#include "vulngraph/javacfg/ast.hpp"

namespace vulngraph::javacfg {

/// Extracts every method body from Java-ish source, tolerantly: input
/// that contains no recognizable methods yields an empty vector rather
/// than an error, and unknown constructs inside a body degrade to plain
/// expression statements. Methods nested inside another method's body
/// (anonymous classes, local classes) are folded into the enclosing
/// statement instead of being extracted separately.
std::vector<Method> parse_java(std::string_view source);

}  // namespace vulngraph::javacfg
