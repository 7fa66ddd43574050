#include "vulngraph/javacfg/export.hpp"

#include <cctype>

#include <json.hpp>
#include <sstream>

#include "vulngraph/common/error.hpp"

namespace vulngraph::javacfg {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

}  // namespace

std::string to_dot(const Cfg& cfg) {
  std::ostringstream os;
  os << "digraph \"" << escape(cfg.method_name) << "\" {\n";
  os << "  rankdir=TB;\n";
  for (const auto& n : cfg.nodes)
    os << "  " << n.id << " [label=\"" << escape(n.label) << "\", kind=\""
       << to_string(n.kind) << "\"];\n";
  for (const auto& [a, b] : cfg.edges) os << "  " << a << " -> " << b << ";\n";
  os << "}\n";
  return os.str();
}

Cfg from_dot(std::string_view dot) {
  Cfg cfg;
  std::istringstream is{std::string(dot)};
  std::string line;
  std::size_t lineno = 0;
  bool in_graph = false;

  auto fail = [&](const std::string& what) {
    throw ParseError(what, lineno, 1);
  };

  // reads a quoted string starting at s[i] == '"'; returns the unescaped
  // payload and leaves i just past the closing quote
  auto read_quoted = [&](const std::string& s, std::size_t& i) {
    std::size_t start = ++i;
    std::string raw;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\' && i + 1 < s.size()) raw += s[i++];
      raw += s[i++];
    }
    if (i >= s.size()) fail("unterminated string");
    ++i;
    return unescape(raw);
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (!in_graph) {
      if (line.compare(i, 7, "digraph") != 0) fail("expected 'digraph'");
      std::size_t q = line.find('"', i);
      if (q == std::string::npos) fail("expected quoted graph name");
      cfg.method_name = read_quoted(line, q);
      in_graph = true;
      continue;
    }
    if (line[i] == '}') break;
    if (line.compare(i, 7, "rankdir") == 0) continue;
    // node or edge: both start with an integer id
    if (!std::isdigit(static_cast<unsigned char>(line[i])))
      fail("expected node id");
    std::size_t id = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
      id = id * 10 + static_cast<std::size_t>(line[i++] - '0');
    while (i < line.size() && line[i] == ' ') ++i;
    if (line.compare(i, 2, "->") == 0) {
      i += 2;
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size() ||
          !std::isdigit(static_cast<unsigned char>(line[i])))
        fail("expected edge destination");
      std::size_t dst = 0;
      while (i < line.size() &&
             std::isdigit(static_cast<unsigned char>(line[i])))
        dst = dst * 10 + static_cast<std::size_t>(line[i++] - '0');
      cfg.edges.emplace_back(id, dst);
      continue;
    }
    if (line[i] != '[') fail("expected '[' after node id");
    std::size_t lq = line.find("label=\"", i);
    if (lq == std::string::npos) fail("node line missing label");
    lq += 6;  // at the quote
    std::string label = read_quoted(line, lq);
    std::size_t kq = line.find("kind=\"", lq);
    if (kq == std::string::npos) fail("node line missing kind");
    kq += 5;
    std::string kind = read_quoted(line, kq);
    if (id != cfg.nodes.size()) fail("node ids must be dense and in order");
    cfg.nodes.push_back({id, node_kind_from_string(kind), std::move(label)});
  }
  if (!in_graph) throw ParseError("empty dot input", 0, 0);
  for (const auto& [a, b] : cfg.edges)
    if (a >= cfg.nodes.size() || b >= cfg.nodes.size())
      throw ParseError("edge references unknown node", lineno, 1);
  return cfg;
}

std::string to_json(const Cfg& cfg) {
  nlohmann::json j;
  j["method"] = cfg.method_name;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : cfg.nodes)
    j["nodes"].push_back({{"id", n.id},
                          {"kind", std::string(to_string(n.kind))},
                          {"label", n.label}});
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : cfg.edges) j["edges"].push_back({a, b});
  return j.dump(2) + "\n";
}

Cfg from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid cfg json: ") + e.what());
  }
  Cfg cfg;
  try {
    cfg.method_name = j.at("method").get<std::string>();
    for (const auto& n : j.at("nodes"))
      cfg.nodes.push_back(
          {n.at("id").get<std::size_t>(),
           node_kind_from_string(n.at("kind").get<std::string>()),
           n.at("label").get<std::string>()});
    for (const auto& e : j.at("edges"))
      cfg.edges.emplace_back(e.at(0).get<std::size_t>(),
                             e.at(1).get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid cfg json: ") + e.what());
  }
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
    if (cfg.nodes[i].id != i)
      throw ParseError("node ids must be dense and in order");
  for (const auto& [a, b] : cfg.edges)
    if (a >= cfg.nodes.size() || b >= cfg.nodes.size())
      throw ParseError("edge references unknown node");
  return cfg;
}

}  // namespace vulngraph::javacfg
