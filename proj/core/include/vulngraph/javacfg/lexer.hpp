#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vulngraph::javacfg {

enum class TokKind { Identifier, Keyword, Number, String, Char, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::size_t line = 0;  // 1-based
  std::size_t col = 0;   // 1-based
  std::size_t offset = 0;  // byte offset into the source

  bool is(std::string_view t) const { return text == t; }
  bool is_kw(std::string_view t) const {
    return kind == TokKind::Keyword && text == t;
  }
};

/// Tokenizes Java-ish source. Comments and whitespace are dropped;
/// unknown bytes are skipped. Never throws: unterminated literals run
/// to end of line (or end of input for text blocks).
std::vector<Token> lex(std::string_view source);

/// Reassembles tokens into a single-line label with Java-ish spacing.
std::string join_tokens(const std::vector<Token>& toks, std::size_t begin,
                        std::size_t end);

}  // namespace vulngraph::javacfg
