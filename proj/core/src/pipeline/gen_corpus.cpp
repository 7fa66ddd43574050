#include "vulngraph/pipeline/gen_corpus.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/rng.hpp"

namespace vulngraph::pipeline {

namespace fs = std::filesystem;

namespace {

const char* pick(const std::vector<const char*>& pool, std::mt19937_64& rng) {
  return pool[sample_uniform(pool.size(), rng)];
}

struct FilePlan {
  std::string class_name;
  std::string body;  // class body (methods, fields)
  std::string imports;
};

// Shared decoration: an occasional retry loop and audit line keep the
// CFG shapes from splitting cleanly along the label.
std::string retry_loop(std::mt19937_64& rng) {
  if (sample_uniform(3, rng) != 0) return "";
  std::ostringstream out;
  out << "        for (int i = 0; i < retries; i = i + 1) {\n"
      << "            metrics.tick(i);\n"
      << "        }\n";
  return out.str();
}

std::string audit_line(const char* what, std::mt19937_64& rng) {
  if (sample_uniform(2, rng) != 0) return "";
  return std::string("        audit.record(\"") + what + "\");\n";
}

std::string null_guard(const char* param, std::mt19937_64& rng) {
  if (sample_uniform(3, rng) != 0) return "";
  std::ostringstream out;
  out << "        if (" << param << " == null) {\n"
      << "            throw new IllegalArgumentException(\"missing "
      << param << "\");\n"
      << "        }\n";
  return out.str();
}

FilePlan plan_sql(std::size_t index, bool vulnerable, std::mt19937_64& rng) {
  const char* param = pick({"name", "login", "key", "owner"}, rng);
  const char* table = pick({"users", "accounts", "orders", "sessions"}, rng);
  const char* column = pick({"name", "email", "owner"}, rng);
  const char* qvar = pick({"query", "sql", "q"}, rng);
  const char* method = pick({"find", "lookup", "fetch"}, rng);
  FilePlan plan;
  plan.class_name = std::string(vulnerable ? "RawDao" : "SafeDao") +
                    std::to_string(index);
  plan.imports = "import java.sql.*;\n";
  std::ostringstream out;
  out << "    private Connection conn;\n\n";
  out << "    ResultSet " << method << "(String " << param << ") throws SQLException {\n";
  out << null_guard(param, rng);
  out << retry_loop(rng);
  if (vulnerable) {
    out << "        String " << qvar << " = \"SELECT * FROM " << table
        << " WHERE " << column << " = '\" + " << param << " + \"'\";\n";
    out << "        Statement stmt = conn.createStatement();\n";
    out << audit_line(table, rng);
    out << "        return stmt.executeQuery(" << qvar << ");\n";
  } else {
    out << "        String " << qvar << " = \"SELECT * FROM " << table
        << " WHERE " << column << " = ?\";\n";
    out << "        PreparedStatement stmt = conn.prepareStatement(" << qvar
        << ");\n";
    out << "        stmt.setString(1, " << param << ");\n";
    out << audit_line(table, rng);
    out << "        return stmt.executeQuery();\n";
  }
  out << "    }\n";
  plan.body = out.str();
  return plan;
}

FilePlan plan_resource(std::size_t index, bool vulnerable,
                       std::mt19937_64& rng) {
  const char* param = pick({"path", "target", "dest"}, rng);
  const char* var = pick({"out", "writer", "sink"}, rng);
  const char* method = pick({"write", "save", "export"}, rng);
  FilePlan plan;
  plan.class_name =
      std::string(vulnerable ? "LeakyWriter" : "ManagedWriter") +
      std::to_string(index);
  plan.imports = "import java.io.*;\n";
  std::ostringstream out;
  out << "    void " << method << "(String " << param
      << ", String data) throws IOException {\n";
  out << null_guard(param, rng);
  if (vulnerable) {
    out << "        FileWriter " << var << " = new FileWriter(" << param
        << ");\n";
    out << "        " << var << ".write(data);\n";
    out << audit_line("write", rng);
    out << "        " << var << ".flush();\n";
  } else {
    out << "        try (FileWriter " << var << " = new FileWriter(" << param
        << ")) {\n";
    out << "            " << var << ".write(data);\n";
    out << "            " << var << ".flush();\n";
    out << "        }\n";
    out << audit_line("write", rng);
  }
  out << retry_loop(rng);
  out << "    }\n";
  plan.body = out.str();
  return plan;
}

FilePlan plan_exec(std::size_t index, bool vulnerable, std::mt19937_64& rng) {
  const char* param = pick({"cmd", "task", "job"}, rng);
  const char* method = pick({"run", "launch", "dispatch"}, rng);
  FilePlan plan;
  plan.class_name =
      std::string(vulnerable ? "ShellRunner" : "GuardedRunner") +
      std::to_string(index);
  std::ostringstream out;
  out << "    void " << method << "(String " << param
      << ") throws Exception {\n";
  out << retry_loop(rng);
  if (vulnerable) {
    out << audit_line("exec", rng);
    out << "        Process p = Runtime.getRuntime().exec(\"sh -c \" + "
        << param << ");\n";
    out << "        p.waitFor();\n";
  } else {
    out << "        if (!allowed.contains(" << param << ")) {\n";
    out << "            throw new IllegalArgumentException(\"rejected\");\n";
    out << "        }\n";
    out << audit_line("exec", rng);
    out << "        Process p = Runtime.getRuntime().exec(" << param
        << ");\n";
    out << "        p.waitFor();\n";
  }
  out << "    }\n";
  plan.body = out.str();
  return plan;
}

FilePlan plan_path(std::size_t index, bool vulnerable, std::mt19937_64& rng) {
  const char* param = pick({"entry", "relative", "child"}, rng);
  const char* method = pick({"read", "load", "open"}, rng);
  FilePlan plan;
  plan.class_name =
      std::string(vulnerable ? "OpenStore" : "CheckedStore") +
      std::to_string(index);
  plan.imports = "import java.io.File;\n";
  std::ostringstream out;
  out << "    private String base;\n\n";
  out << "    byte[] " << method << "(String " << param << ") {\n";
  out << null_guard(param, rng);
  if (vulnerable) {
    out << "        File f = new File(base + \"/\" + " << param << ");\n";
    out << audit_line("read", rng);
    out << "        return loader.read(f);\n";
  } else {
    out << "        if (" << param << ".contains(\"..\")) {\n";
    out << "            throw new IllegalArgumentException(\"traversal\");\n";
    out << "        }\n";
    out << "        File f = new File(base, " << param << ");\n";
    out << audit_line("read", rng);
    out << "        return loader.read(f);\n";
  }
  out << "    }\n";
  plan.body = out.str();
  return plan;
}

std::string helper_method(bool vulnerable, std::mt19937_64& rng) {
  std::ostringstream out;
  out << '\n';
  if (vulnerable) {
    const char* table = pick({"log", "history", "trace"}, rng);
    out << "    void purge(String id) throws SQLException {\n";
    out << "        Statement s = conn.createStatement();\n";
    out << "        s.execute(\"DELETE FROM " << table
        << " WHERE id = \" + id);\n";
    out << "    }\n";
  } else {
    out << "    int clamp(int v) {\n";
    out << "        if (v < 0) {\n";
    out << "            return 0;\n";
    out << "        }\n";
    out << "        return v;\n";
    out << "    }\n";
  }
  return out.str();
}

}  // namespace

std::size_t generate_corpus(const std::string& out_dir,
                            const CorpusSpec& spec) {
  if (spec.files == 0) throw ConfigError("corpus size must be positive");
  const std::size_t count = (spec.files + 7) / 8 * 8;
  const fs::path root(out_dir);
  fs::create_directories(root / "src");

  std::ofstream labels(root / "labels.csv", std::ios::trunc);
  if (!labels) throw Error("cannot write labels.csv under " + out_dir);
  labels << "path,label\n";

  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + i);
    const bool vulnerable = i % 2 == 1;
    FilePlan plan;
    switch ((i / 2) % 4) {
      case 0: plan = plan_sql(i, vulnerable, rng); break;
      case 1: plan = plan_resource(i, vulnerable, rng); break;
      case 2: plan = plan_exec(i, vulnerable, rng); break;
      default: plan = plan_path(i, vulnerable, rng); break;
    }
    std::ostringstream file;
    file << plan.imports;
    if (!plan.imports.empty()) file << '\n';
    file << "class " << plan.class_name << " {\n";
    file << plan.body;
    if (i % 5 == 0) file << helper_method(vulnerable, rng);
    file << "}\n";

    const std::string rel = "src/" + plan.class_name + ".java";
    std::ofstream out(root / rel, std::ios::trunc);
    if (!out) throw Error("cannot write " + rel);
    out << file.str();
    labels << rel << ',' << (vulnerable ? 1 : 0) << '\n';
  }
  return count;
}

}  // namespace vulngraph::pipeline
