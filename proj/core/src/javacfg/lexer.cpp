#include "vulngraph/javacfg/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace vulngraph::javacfg {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double",
    "else", "enum", "extends", "final", "finally", "float", "for",
    "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "package", "private",
    "protected", "public", "record", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw",
    "throws", "transient", "try", "var", "void", "volatile", "while",
    "yield"};

// longest-match first within each leading character
const std::array<std::string_view, 36> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=", "&&",
    "||",   "++",  "--",  "->",  "::",  "+=", "-=", "*=", "/=", "%=",
    "&=",   "|=",  "^=",  "<<",  ">>",  "+",  "-",  "*",  "/",  "%",
    "&",    "|",   "^",   "!",   "<",   ">"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_body(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](TokKind kind, std::size_t begin, std::size_t end,
                  std::size_t tl, std::size_t tc) {
    out.push_back({kind, std::string(src.substr(begin, end - begin)), tl, tc,
                   begin});
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
        advance(1);
      advance(i + 1 < src.size() ? 2 : 1);
      continue;
    }
    std::size_t tl = line, tc = col, begin = i;
    if (ident_start(c)) {
      while (i < src.size() && ident_body(src[i])) advance(1);
      std::string_view word = src.substr(begin, i - begin);
      push(kKeywords.count(word) ? TokKind::Keyword : TokKind::Identifier,
           begin, i, tl, tc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) ||
              src[i] == '.' || src[i] == '_' ||
              ((src[i] == '+' || src[i] == '-') && i > begin &&
               (src[i - 1] == 'e' || src[i - 1] == 'E' || src[i - 1] == 'p' ||
                src[i - 1] == 'P'))))
        advance(1);
      push(TokKind::Number, begin, i, tl, tc);
      continue;
    }
    if (c == '"') {
      // text block?
      if (src.substr(i, 3) == "\"\"\"") {
        advance(3);
        while (i < src.size() && src.substr(i, 3) != "\"\"\"") advance(1);
        advance(std::min<std::size_t>(3, src.size() - i));
        push(TokKind::String, begin, i, tl, tc);
        continue;
      }
      advance(1);
      while (i < src.size() && src[i] != '"' && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < src.size()) advance(1);
        advance(1);
      }
      if (i < src.size() && src[i] == '"') advance(1);
      push(TokKind::String, begin, i, tl, tc);
      continue;
    }
    if (c == '\'') {
      advance(1);
      while (i < src.size() && src[i] != '\'' && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < src.size()) advance(1);
        advance(1);
      }
      if (i < src.size() && src[i] == '\'') advance(1);
      push(TokKind::Char, begin, i, tl, tc);
      continue;
    }
    bool matched = false;
    for (std::string_view op : kOperators) {
      if (src.substr(i, op.size()) == op) {
        advance(op.size());
        push(TokKind::Punct, begin, i, tl, tc);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    // single-char punctuation (braces, parens, ;, ,, ., @, ?, :, =, ~, [ ])
    advance(1);
    push(TokKind::Punct, begin, i, tl, tc);
  }
  out.push_back({TokKind::End, "", line, col, src.size()});
  return out;
}

std::string join_tokens(const std::vector<Token>& toks, std::size_t begin,
                        std::size_t end) {
  std::string out;
  for (std::size_t k = begin; k < end && k < toks.size(); ++k) {
    const std::string& t = toks[k].text;
    if (t.empty()) continue;
    if (!out.empty()) {
      const std::string& prev = toks[k - 1].text;
      bool no_space =
          t == ")" || t == "]" || t == ";" || t == "," || t == "." ||
          t == "++" || t == "--" || prev == "(" || prev == "[" ||
          prev == "." || prev == "!" || prev == "@" || prev == "::" ||
          t == "::" ||
          (t == "(" && (toks[k - 1].kind == TokKind::Identifier ||
                        prev == ")" || prev == "]" ||
                        toks[k - 1].is_kw("this") ||
                        toks[k - 1].is_kw("super"))) ||
          (t == "[" && (toks[k - 1].kind == TokKind::Identifier ||
                        toks[k - 1].kind == TokKind::Keyword ||
                        prev == ")" || prev == "]"));
      if (!no_space) out += ' ';
    }
    out += t;
  }
  return out;
}

}  // namespace vulngraph::javacfg
