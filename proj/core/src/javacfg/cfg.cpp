#include "vulngraph/javacfg/cfg.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "vulngraph/common/error.hpp"

namespace vulngraph::javacfg {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Entry: return "entry";
    case NodeKind::Exit: return "exit";
    case NodeKind::Statement: return "statement";
    case NodeKind::Branch: return "branch";
    case NodeKind::Loop: return "loop";
    case NodeKind::Switch: return "switch";
    case NodeKind::Try: return "try";
    case NodeKind::Catch: return "catch";
    case NodeKind::Return: return "return";
  }
  return "statement";
}

NodeKind node_kind_from_string(std::string_view s) {
  for (std::size_t k = 0; k < kNodeKindCount; ++k)
    if (to_string(static_cast<NodeKind>(k)) == s)
      return static_cast<NodeKind>(k);
  throw ParseError("unknown node kind '" + std::string(s) + "'");
}

namespace {

/// Frontier-style builder: a statement attaches the current dangling
/// edge set to its first node and leaves its own dangling set behind.
class Builder {
 public:
  explicit Builder(const Method& method) {
    add_node(NodeKind::Entry, "entry");
    frontier_ = {0};
    emit_list(method.body);
    std::size_t exit = add_node(NodeKind::Exit, "exit");
    attach(frontier_, exit);
    attach(exit_pending_, exit);
    cfg_.method_name = method.name;
    finish(exit);
  }

  Cfg take() { return std::move(cfg_); }

 private:
  struct Ctx {
    std::string label;            // enclosing label name, may be empty
    bool is_loop = false;
    bool unlabeled_ok = true;     // false for labeled blocks
    bool continue_deferred = false;  // do-while: header not built yet
    std::size_t continue_target = 0;
    std::vector<std::size_t> break_nodes;
    std::vector<std::size_t> continue_nodes;
  };

  Cfg cfg_;
  std::vector<std::size_t> frontier_;
  std::vector<std::size_t> exit_pending_;
  std::vector<Ctx> ctx_;
  std::string pending_label_;

  std::size_t add_node(NodeKind kind, std::string label) {
    std::size_t id = cfg_.nodes.size();
    if (label.size() > kMaxLabelLength) {
      label.resize(kMaxLabelLength - 3);
      label += "...";
    }
    cfg_.nodes.push_back({id, kind, std::move(label)});
    return id;
  }

  void attach(const std::vector<std::size_t>& from, std::size_t to) {
    for (std::size_t f : from) cfg_.edges.emplace_back(f, to);
  }

  /// Connects the frontier to a fresh node, which becomes the frontier.
  std::size_t chain(NodeKind kind, std::string label) {
    std::size_t n = add_node(kind, std::move(label));
    attach(frontier_, n);
    frontier_ = {n};
    return n;
  }

  void emit_list(const StmtList& list) {
    for (const auto& s : list) emit(*s);
  }

  Ctx* find_break_ctx(const std::string& label) {
    for (auto it = ctx_.rbegin(); it != ctx_.rend(); ++it)
      if (label.empty() ? it->unlabeled_ok : it->label == label) return &*it;
    return nullptr;
  }

  Ctx* find_continue_ctx(const std::string& label) {
    for (auto it = ctx_.rbegin(); it != ctx_.rend(); ++it) {
      if (!it->is_loop) continue;
      if (label.empty() || it->label == label) return &*it;
    }
    return nullptr;
  }

  std::string take_pending_label() { return std::exchange(pending_label_, ""); }

  void emit(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Expr:
        chain(NodeKind::Statement, s.head);
        break;
      case Stmt::Kind::Block:
        emit_list(s.children);
        break;
      case Stmt::Kind::If:
        emit_if(s);
        break;
      case Stmt::Kind::While:
      case Stmt::Kind::For:
        emit_loop(s);
        break;
      case Stmt::Kind::DoWhile:
        emit_do_while(s);
        break;
      case Stmt::Kind::Switch:
        emit_switch(s);
        break;
      case Stmt::Kind::Break:
        emit_break(s);
        break;
      case Stmt::Kind::Continue:
        emit_continue(s);
        break;
      case Stmt::Kind::Return:
      case Stmt::Kind::Throw: {
        std::size_t n = chain(NodeKind::Return, s.head);
        exit_pending_.push_back(n);
        frontier_.clear();
        break;
      }
      case Stmt::Kind::Try:
        emit_try(s);
        break;
      case Stmt::Kind::Labeled:
        emit_labeled(s);
        break;
    }
  }

  void emit_if(const Stmt& s) {
    take_pending_label();
    std::size_t b = chain(NodeKind::Branch, s.head);
    emit(*s.children[0]);
    std::vector<std::size_t> joined = std::move(frontier_);
    if (s.children.size() > 1) {
      frontier_ = {b};
      emit(*s.children[1]);
      joined.insert(joined.end(), frontier_.begin(), frontier_.end());
    } else {
      joined.push_back(b);  // false edge falls through
    }
    frontier_ = std::move(joined);
  }

  void emit_loop(const Stmt& s) {
    std::string label = take_pending_label();
    std::size_t h = chain(NodeKind::Loop, s.head);
    ctx_.push_back({.label = label, .is_loop = true, .continue_target = h});
    emit(*s.children[0]);
    attach(frontier_, h);  // back edge
    Ctx done = std::move(ctx_.back());
    ctx_.pop_back();
    // the header always reaches the code after the loop
    frontier_ = {h};
    frontier_.insert(frontier_.end(), done.break_nodes.begin(),
                     done.break_nodes.end());
  }

  void emit_do_while(const Stmt& s) {
    std::string label = take_pending_label();
    std::size_t body_head = cfg_.nodes.size();
    ctx_.push_back({.label = label, .is_loop = true, .continue_deferred = true});
    emit(*s.children[0]);
    std::size_t c = add_node(NodeKind::Loop, s.head);
    attach(frontier_, c);
    // back edge to the first body node; an empty body loops on the test
    cfg_.edges.emplace_back(c, body_head < c ? body_head : c);
    Ctx done = std::move(ctx_.back());
    ctx_.pop_back();
    for (std::size_t n : done.continue_nodes) cfg_.edges.emplace_back(n, c);
    frontier_ = {c};
    frontier_.insert(frontier_.end(), done.break_nodes.begin(),
                     done.break_nodes.end());
  }

  void emit_switch(const Stmt& s) {
    std::string label = take_pending_label();
    std::size_t sw = chain(NodeKind::Switch, s.head);
    ctx_.push_back({.label = label});
    std::vector<std::size_t> fall;  // falls through from previous case
    bool has_default = false;
    for (const auto& c : s.cases) {
      if (c.label_text.rfind("default", 0) == 0) has_default = true;
      if (c.body.empty()) continue;  // empty case aliases the next head
      frontier_ = fall;
      frontier_.push_back(sw);
      emit_list(c.body);
      fall = c.arrow ? std::vector<std::size_t>{}
                     : std::move(frontier_);
      if (c.arrow)
        for (std::size_t n : frontier_) ctx_.back().break_nodes.push_back(n);
    }
    Ctx done = std::move(ctx_.back());
    ctx_.pop_back();
    frontier_ = std::move(fall);
    frontier_.insert(frontier_.end(), done.break_nodes.begin(),
                     done.break_nodes.end());
    if (!has_default) frontier_.push_back(sw);
  }

  void emit_break(const Stmt& s) {
    std::size_t n = chain(NodeKind::Statement, s.head);
    frontier_.clear();
    if (Ctx* ctx = find_break_ctx(s.target_label))
      ctx->break_nodes.push_back(n);
    else
      exit_pending_.push_back(n);  // malformed: fail toward exit
  }

  void emit_continue(const Stmt& s) {
    std::size_t n = chain(NodeKind::Statement, s.head);
    frontier_.clear();
    Ctx* ctx = find_continue_ctx(s.target_label);
    if (!ctx) {
      exit_pending_.push_back(n);
    } else if (ctx->continue_deferred) {
      ctx->continue_nodes.push_back(n);
    } else {
      cfg_.edges.emplace_back(n, ctx->continue_target);
    }
  }

  void emit_try(const Stmt& s) {
    take_pending_label();
    std::size_t t = chain(NodeKind::Try, s.head);
    emit(*s.children[0]);
    std::vector<std::size_t> merged = std::move(frontier_);
    for (const auto& cc : s.catches) {
      std::size_t c = add_node(NodeKind::Catch, cc.decl_text);
      cfg_.edges.emplace_back(t, c);
      frontier_ = {c};
      emit_list(cc.body);
      merged.insert(merged.end(), frontier_.begin(), frontier_.end());
    }
    frontier_ = std::move(merged);
    if (s.has_finally) emit_list(s.finally_body);
  }

  void emit_labeled(const Stmt& s) {
    const Stmt& child = *s.children[0];
    bool loopish = child.kind == Stmt::Kind::While ||
                   child.kind == Stmt::Kind::For ||
                   child.kind == Stmt::Kind::DoWhile ||
                   child.kind == Stmt::Kind::Switch;
    if (loopish) {
      pending_label_ = s.target_label;
      emit(child);
      return;
    }
    // labeled block: a break on the label jumps past the statement
    ctx_.push_back({.label = s.target_label, .unlabeled_ok = false});
    emit(child);
    Ctx done = std::move(ctx_.back());
    ctx_.pop_back();
    frontier_.insert(frontier_.end(), done.break_nodes.begin(),
                     done.break_nodes.end());
  }

  /// Prunes unreachable nodes, remaps ids, dedups and sorts edges, and
  /// demotes branch-ish nodes whose surviving out-degree dropped below 2.
  void finish(std::size_t exit) {
    std::vector<std::vector<std::size_t>> adj(cfg_.nodes.size());
    for (const auto& [a, b] : cfg_.edges) adj[a].push_back(b);
    std::vector<bool> reach(cfg_.nodes.size(), false);
    std::deque<std::size_t> q = {0};
    reach[0] = true;
    while (!q.empty()) {
      std::size_t n = q.front();
      q.pop_front();
      for (std::size_t m : adj[n])
        if (!reach[m]) {
          reach[m] = true;
          q.push_back(m);
        }
    }
    reach[exit] = true;  // exit always survives

    std::vector<std::size_t> remap(cfg_.nodes.size(), SIZE_MAX);
    std::vector<CfgNode> nodes;
    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
      if (!reach[i]) continue;
      remap[i] = nodes.size();
      CfgNode n = std::move(cfg_.nodes[i]);
      n.id = remap[i];
      nodes.push_back(std::move(n));
    }
    std::vector<Edge> edges;
    for (const auto& [a, b] : cfg_.edges)
      if (reach[a] && reach[b]) edges.emplace_back(remap[a], remap[b]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<std::size_t> outdeg(nodes.size(), 0);
    for (const auto& [a, b] : edges) ++outdeg[a];
    for (auto& n : nodes)
      if ((n.kind == NodeKind::Branch || n.kind == NodeKind::Switch) &&
          outdeg[n.id] < 2)
        n.kind = NodeKind::Statement;

    cfg_.nodes = std::move(nodes);
    cfg_.edges = std::move(edges);
  }
};

}  // namespace

Cfg build_cfg(const Method& method) { return Builder(method).take(); }

CfgStats compute_stats(const std::vector<Cfg>& cfgs) {
  CfgStats st;
  st.methods = cfgs.size();
  for (const auto& c : cfgs) {
    st.total_nodes += c.nodes.size();
    st.total_edges += c.edges.size();
    st.max_nodes = std::max(st.max_nodes, c.nodes.size());
  }
  if (st.methods) {
    st.avg_nodes = static_cast<double>(st.total_nodes) /
                   static_cast<double>(st.methods);
    st.avg_edges = static_cast<double>(st.total_edges) /
                   static_cast<double>(st.methods);
  }
  return st;
}

}  // namespace vulngraph::javacfg
