#include "vulngraph/javacfg/parser.hpp"

#include <algorithm>

#include "vulngraph/javacfg/lexer.hpp"

namespace vulngraph::javacfg {

namespace {

bool is_open(const std::string& t) {
  return t == "(" || t == "[" || t == "{";
}
bool is_close(const std::string& t) {
  return t == ")" || t == "]" || t == "}";
}

/// Recursive-descent statement parser over a token window. Tolerant:
/// every path advances the cursor, malformed input degrades to plain
/// expression statements, and running out of tokens closes everything.
class StmtParser {
 public:
  StmtParser(const std::vector<Token>& toks, std::size_t pos)
      : toks_(toks), pos_(pos) {}

  StmtList parse_block_contents() {
    StmtList out;
    while (!at_end() && !cur().is("}")) {
      std::size_t before = pos_;
      StmtPtr s = parse_statement();
      if (s) out.push_back(std::move(s));
      if (pos_ == before) ++pos_;  // safety: never stall
    }
    return out;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::vector<Token>& toks_;
  std::size_t pos_;

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokKind::End; }
  void eat() {
    if (!at_end()) ++pos_;
  }
  bool eat_if(std::string_view t) {
    if (cur().text == t) {
      eat();
      return true;
    }
    return false;
  }

  /// Consumes from an opening bracket through its match; returns the
  /// token range strictly inside.
  std::pair<std::size_t, std::size_t> consume_balanced() {
    std::size_t begin = pos_ + 1;
    int depth = 0;
    while (!at_end()) {
      if (is_open(cur().text)) ++depth;
      if (is_close(cur().text) && --depth == 0) {
        eat();
        return {begin, pos_ - 1};
      }
      eat();
    }
    return {begin, pos_};
  }

  /// Consumes up to and including ';' at bracket depth zero; stops
  /// before a stray '}' instead. Returns the range without the ';'.
  std::pair<std::size_t, std::size_t> consume_until_semi() {
    std::size_t begin = pos_;
    int depth = 0;
    while (!at_end()) {
      const std::string& t = cur().text;
      if (depth == 0 && t == ";") {
        eat();
        return {begin, pos_ - 1};
      }
      if (depth == 0 && t == "}") return {begin, pos_};
      if (is_open(t)) ++depth;
      if (is_close(t)) depth = std::max(0, depth - 1);
      eat();
    }
    return {begin, pos_};
  }

  std::string paren_head(const char* kw) {
    std::string head = kw;
    if (cur().is("(")) {
      auto [b, e] = consume_balanced();
      head += " (" + join_tokens(toks_, b, e) + ")";
    }
    return head;
  }

  StmtPtr make(Stmt::Kind kind, std::string head) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->head = std::move(head);
    return s;
  }

  StmtPtr wrap_block(StmtList body) {
    auto s = make(Stmt::Kind::Block, "");
    s->children = std::move(body);
    return s;
  }

  /// Parses the next statement; returns null for skipped constructs
  /// (empty statements, stray tokens).
  StmtPtr parse_statement() {
    if (at_end() || cur().is("}")) return nullptr;
    const Token& t = cur();

    if (t.is(";")) {
      eat();
      return nullptr;
    }
    if (t.is("{")) {
      eat();
      StmtList body = parse_block_contents();
      eat_if("}");
      return wrap_block(std::move(body));
    }
    if (t.is_kw("if")) return parse_if();
    if (t.is_kw("while")) return parse_while();
    if (t.is_kw("do")) return parse_do();
    if (t.is_kw("for")) return parse_for();
    if (t.is_kw("switch")) return parse_switch();
    if (t.is_kw("try")) return parse_try();
    if (t.is_kw("synchronized")) return parse_synchronized();
    if (t.is_kw("break") || t.is_kw("continue")) return parse_jump();
    if (t.is_kw("return") || t.is_kw("throw")) return parse_exiting();
    if (t.is_kw("class") || t.is_kw("interface") || t.is_kw("enum") ||
        t.is_kw("record"))
      return parse_local_type();
    if (t.kind == TokKind::Identifier && ahead(1).is(":") &&
        !ahead(1).is("::"))
      return parse_labeled();
    // plain expression / local declaration
    auto [b, e] = consume_until_semi();
    if (e > b || toks_[b].is(";"))
      return make(Stmt::Kind::Expr, join_tokens(toks_, b, e) + ";");
    return nullptr;
  }

  StmtPtr parse_if() {
    eat();
    auto s = make(Stmt::Kind::If, paren_head("if"));
    StmtPtr then = parse_statement();
    s->children.push_back(then ? std::move(then) : wrap_block({}));
    if (cur().is_kw("else")) {
      eat();
      StmtPtr els = parse_statement();
      s->children.push_back(els ? std::move(els) : wrap_block({}));
    }
    return s;
  }

  StmtPtr parse_while() {
    eat();
    auto s = make(Stmt::Kind::While, paren_head("while"));
    StmtPtr body = parse_statement();
    s->children.push_back(body ? std::move(body) : wrap_block({}));
    return s;
  }

  StmtPtr parse_do() {
    eat();
    auto s = make(Stmt::Kind::DoWhile, "do-while");
    StmtPtr body = parse_statement();
    s->children.push_back(body ? std::move(body) : wrap_block({}));
    if (cur().is_kw("while")) {
      eat();
      s->head = paren_head("do-while");
    }
    eat_if(";");
    return s;
  }

  StmtPtr parse_for() {
    eat();
    auto s = make(Stmt::Kind::For, paren_head("for"));
    StmtPtr body = parse_statement();
    s->children.push_back(body ? std::move(body) : wrap_block({}));
    return s;
  }

  StmtPtr parse_switch() {
    eat();
    auto s = make(Stmt::Kind::Switch, paren_head("switch"));
    if (!eat_if("{")) return s;
    SwitchCase* current = nullptr;
    while (!at_end() && !cur().is("}")) {
      if (cur().is_kw("case") || cur().is_kw("default")) {
        SwitchCase sc;
        std::size_t b = pos_;
        eat();
        int depth = 0;
        while (!at_end()) {
          const std::string& txt = cur().text;
          if (depth == 0 && (txt == ":" || txt == "->")) break;
          if (is_open(txt)) ++depth;
          if (is_close(txt)) --depth;
          eat();
        }
        bool arrow = cur().is("->");
        sc.label_text = join_tokens(toks_, b, pos_) + ":";
        sc.arrow = arrow;
        eat();  // ':' or '->'
        s->cases.push_back(std::move(sc));
        current = &s->cases.back();
        if (arrow) {
          // one statement or block, no fall-through
          StmtPtr body = parse_statement();
          if (body) current->body.push_back(std::move(body));
          current = nullptr;
        }
        continue;
      }
      std::size_t before = pos_;
      StmtPtr st = parse_statement();
      if (st) {
        if (!current) {
          s->cases.push_back({});
          current = &s->cases.back();
          current->label_text = "case?:";
        }
        current->body.push_back(std::move(st));
      }
      if (pos_ == before) ++pos_;
    }
    eat_if("}");
    return s;
  }

  StmtPtr parse_try() {
    eat();
    auto s = make(Stmt::Kind::Try, "try");
    if (cur().is("(")) {  // try-with-resources
      auto [b, e] = consume_balanced();
      s->head = "try (" + join_tokens(toks_, b, e) + ")";
    }
    if (eat_if("{")) {
      s->children.push_back(wrap_block(parse_block_contents()));
      eat_if("}");
    } else {
      s->children.push_back(wrap_block({}));
    }
    while (cur().is_kw("catch")) {
      eat();
      CatchClause cc;
      cc.decl_text = paren_head("catch");
      if (eat_if("{")) {
        cc.body = parse_block_contents();
        eat_if("}");
      }
      s->catches.push_back(std::move(cc));
    }
    if (cur().is_kw("finally")) {
      eat();
      s->has_finally = true;
      if (eat_if("{")) {
        s->finally_body = parse_block_contents();
        eat_if("}");
      }
    }
    return s;
  }

  StmtPtr parse_synchronized() {
    eat();
    StmtList wrapped;
    wrapped.push_back(make(Stmt::Kind::Expr, paren_head("synchronized")));
    if (eat_if("{")) {
      StmtList body = parse_block_contents();
      eat_if("}");
      for (auto& st : body) wrapped.push_back(std::move(st));
    }
    return wrap_block(std::move(wrapped));
  }

  StmtPtr parse_jump() {
    bool is_break = cur().is_kw("break");
    eat();
    auto s = make(is_break ? Stmt::Kind::Break : Stmt::Kind::Continue, "");
    if (cur().kind == TokKind::Identifier) {
      s->target_label = cur().text;
      eat();
    }
    eat_if(";");
    s->head = std::string(is_break ? "break" : "continue") +
              (s->target_label.empty() ? "" : " " + s->target_label) + ";";
    return s;
  }

  StmtPtr parse_exiting() {
    bool is_return = cur().is_kw("return");
    auto [b, e] = consume_until_semi();
    return make(is_return ? Stmt::Kind::Return : Stmt::Kind::Throw,
                join_tokens(toks_, b, e) + ";");
  }

  StmtPtr parse_local_type() {
    // local class declaration: keep it as one opaque statement
    std::size_t b = pos_;
    while (!at_end() && !cur().is("{") && !cur().is(";")) eat();
    std::string head = join_tokens(toks_, b, pos_);
    if (cur().is("{")) {
      consume_balanced();
      head += " {...}";
    } else {
      eat_if(";");
      head += ";";
    }
    return make(Stmt::Kind::Expr, head);
  }

  StmtPtr parse_labeled() {
    auto s = make(Stmt::Kind::Labeled, cur().text + ":");
    s->target_label = cur().text;
    eat();  // label
    eat();  // ':'
    StmtPtr child = parse_statement();
    s->children.push_back(child ? std::move(child) : wrap_block({}));
    return s;
  }
};

bool method_name_candidate(const std::vector<Token>& toks, std::size_t i) {
  if (toks[i].kind != TokKind::Identifier) return false;
  if (i > 0) {
    const Token& p = toks[i - 1];
    if (p.is(".") || p.is("@") || p.is_kw("new") || p.is_kw("class") ||
        p.is_kw("interface") || p.is_kw("enum") || p.is_kw("record") ||
        p.is_kw("throw") || p.is_kw("return") || p.is_kw("case"))
      return false;
  }
  return toks[i + 1].is("(");
}

/// Walks back from the method name over return type / modifier tokens
/// to find where the signature starts.
std::size_t signature_start(const std::vector<Token>& toks, std::size_t name) {
  std::size_t k = name;
  while (k > 0) {
    const Token& p = toks[k - 1];
    bool type_ish =
        p.kind == TokKind::Identifier ||
        (p.kind == TokKind::Keyword && !p.is_kw("class") &&
         !p.is_kw("interface") && !p.is_kw("enum") && !p.is_kw("record") &&
         !p.is_kw("new") && !p.is_kw("return") && !p.is_kw("else") &&
         !p.is_kw("do") && !p.is_kw("try") && !p.is_kw("finally")) ||
        p.is("<") || p.is(">") || p.is(",") || p.is(".") || p.is("[") ||
        p.is("]") || p.is("@") || p.is("...");
    if (!type_ish) break;
    --k;
  }
  return k;
}

}  // namespace

std::vector<Method> parse_java(std::string_view source) {
  std::vector<Token> toks = lex(source);
  std::vector<Method> methods;
  std::size_t i = 0;
  while (toks[i].kind != TokKind::End) {
    if (!method_name_candidate(toks, i)) {
      ++i;
      continue;
    }
    // find the ')' closing the parameter list
    std::size_t j = i + 1;
    int depth = 0;
    while (toks[j].kind != TokKind::End) {
      if (is_open(toks[j].text)) ++depth;
      if (is_close(toks[j].text) && --depth == 0) break;
      ++j;
    }
    if (toks[j].kind == TokKind::End) break;
    // optional throws clause, then the body brace
    std::size_t k = j + 1;
    if (toks[k].is_kw("throws")) {
      ++k;
      while (toks[k].kind == TokKind::Identifier || toks[k].is(",") ||
             toks[k].is("."))
        ++k;
    }
    if (!toks[k].is("{")) {
      ++i;
      continue;
    }
    Method m;
    m.name = toks[i].text;
    m.params = join_tokens(toks, i + 2, j);
    StmtParser parser(toks, k + 1);
    m.body = parser.parse_block_contents();
    std::size_t close = parser.pos();  // at '}' or End
    std::size_t sig = signature_start(toks, i);
    std::size_t end_off = toks[close].kind == TokKind::End
                              ? source.size()
                              : toks[close].offset + 1;
    m.source = std::string(source.substr(toks[sig].offset,
                                         end_off - toks[sig].offset));
    methods.push_back(std::move(m));
    i = close + 1;
  }
  return methods;
}

}  // namespace vulngraph::javacfg
