#pragma once

#include <memory>
#include <string>
#include <vector>

namespace vulngraph::javacfg {

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using StmtList = std::vector<StmtPtr>;

struct SwitchCase {
  std::string label_text;  // "case FOO:" or "default:"
  bool arrow = false;      // `case X ->` form: no fall-through
  StmtList body;
};

struct CatchClause {
  std::string decl_text;  // "catch (IOException e)"
  StmtList body;
};

/// One parsed statement. `head` is the normalized single-line text used
/// as the CFG node label (condition only, for compound statements).
struct Stmt {
  enum class Kind {
    Expr,      // expression or local declaration, up to ';'
    Block,     // children
    If,        // children[0] = then, optional children[1] = else
    While,     // children[0] = body
    DoWhile,   // children[0] = body
    For,       // classic or enhanced; children[0] = body
    Switch,    // cases
    Break,     // target_label may name a labeled construct
    Continue,  // target_label may name a labeled construct
    Return,
    Throw,
    Try,       // children[0] = body; catches; finally_body
    Labeled,   // children[0] = labeled statement; target_label = label
  };

  Kind kind = Kind::Expr;
  std::string head;
  std::string target_label;
  StmtList children;
  std::vector<SwitchCase> cases;      // Switch only
  std::vector<CatchClause> catches;   // Try only
  StmtList finally_body;              // Try only
  bool has_finally = false;
};

/// A method (or constructor) pulled out of a source file.
struct Method {
  std::string name;
  std::string params;   // raw text inside the parameter parens
  std::string source;   // verbatim source slice, signature through body
  StmtList body;
};

}  // namespace vulngraph::javacfg
