#include "vulngraph/pipeline/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/hash.hpp"
#include "vulngraph/common/log.hpp"
#include "vulngraph/common/rng.hpp"
#include "vulngraph/javacfg/parser.hpp"

namespace vulngraph::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ConfigError("unknown split: " + std::string(s));
}

std::vector<std::size_t> DatasetManifest::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].split == s) out.push_back(i);
  }
  return out;
}

std::size_t DatasetManifest::count(Split s, int label) const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (e.split == s && e.label == label) ++n;
  }
  return n;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_label(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v == "0" || v == "safe") return 0;
  if (v == "1" || v == "vulnerable") return 1;
  throw ParseError("bad label '" + v + "' in " + where);
}

std::map<std::string, int> read_labels(const std::string& labels_file) {
  std::ifstream in(labels_file);
  if (!in) throw Error("cannot open labels file: " + labels_file);
  std::map<std::string, int> labels;
  std::string line;
  const bool jsonl = labels_file.size() > 6 &&
                     labels_file.rfind(".jsonl") == labels_file.size() - 6;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (jsonl) {
      auto obj = nlohmann::json::parse(t, nullptr, false);
      if (obj.is_discarded() || !obj.contains("path") ||
          !obj.contains("label")) {
        throw ParseError("bad JSONL label record", static_cast<int>(line_no),
                         1);
      }
      const std::string path = obj["path"].get<std::string>();
      if (obj["label"].is_number_integer()) {
        const int v = obj["label"].get<int>();
        if (v != 0 && v != 1) {
          throw ParseError("label must be 0 or 1 at line " +
                           std::to_string(line_no));
        }
        labels[path] = v;
      } else if (obj["label"].is_string()) {
        labels[path] = parse_label(obj["label"].get<std::string>(),
                                   labels_file);
      } else {
        throw ParseError("label must be 0/1 or safe/vulnerable at line " +
                         std::to_string(line_no));
      }
    } else {
      if (line_no == 1 && t == "path,label") continue;  // header
      const auto comma = t.find_last_of(',');
      if (comma == std::string::npos) {
        throw ParseError("expected 'path,label'", static_cast<int>(line_no),
                         1);
      }
      labels[trim(t.substr(0, comma))] =
          parse_label(t.substr(comma + 1), labels_file);
    }
  }
  return labels;
}

// Largest-remainder per-class counts; remainder ties go train > val > test.
std::array<std::size_t, 3> split_counts(std::size_t n, double f_train,
                                        double f_val) {
  const double exact[3] = {n * f_train, n * f_val,
                           n * (1.0 - f_train - f_val)};
  std::array<std::size_t, 3> counts{};
  double remainders[3];
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    counts[k] = static_cast<std::size_t>(exact[k]);
    remainders[k] = exact[k] - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::array<int, 3> order = {0, 1, 2};
  // near-ties (float noise in 1 - f_train - f_val) resolve in
  // train > val > test order via the stable sort
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainders[a] > remainders[b] + 1e-9;
  });
  for (std::size_t give = 0; give < n - assigned; ++give) {
    ++counts[order[give % 3]];
  }
  return counts;
}

}  // namespace

DatasetManifest ingest(const std::string& root_dir,
                       const std::string& labels_file,
                       const IngestConfig& config) {
  if (config.train_fraction <= 0.0 || config.val_fraction < 0.0 ||
      config.train_fraction + config.val_fraction > 1.0) {
    throw ConfigError("split fractions must be positive and sum to at most 1");
  }
  const auto labels = read_labels(labels_file);

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".java") {
      files.push_back(
          fs::relative(entry.path(), root_dir).generic_string());
    }
  }
  std::sort(files.begin(), files.end());

  DatasetManifest manifest;
  std::set<std::string> seen_hashes;
  for (const auto& rel : files) {
    std::ifstream in(fs::path(root_dir) / rel, std::ios::binary);
    if (!in) throw Error("cannot read source file: " + rel);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string source = buf.str();

    auto label_it = labels.find(rel);
    if (label_it == labels.end()) throw LabelMissingError(rel);

    const std::string id = content_hash(source);
    if (!seen_hashes.insert(id).second) {
      ++manifest.duplicates_dropped;
      continue;
    }
    if (javacfg::parse_java(source).empty()) {
      ++manifest.unparsable_dropped;
      continue;
    }
    SampleEntry e;
    e.path = rel;
    e.sample_id = id;
    e.label = label_it->second;
    e.source = std::move(source);
    manifest.entries.push_back(std::move(e));
  }
  if (manifest.entries.empty()) {
    throw EmptyCorpusError("no usable .java files under " + root_dir);
  }
  if (manifest.unparsable_dropped > 0) {
    log::info("dataset", "dropped " +
                             std::to_string(manifest.unparsable_dropped) +
                             " files with no parsable methods");
  }

  // stratified split: shuffle within each class, then slice
  std::mt19937_64 rng(config.seed);
  for (int label = 0; label <= 1; ++label) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].label == label) members.push_back(i);
    }
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                return manifest.entries[a].sample_id <
                       manifest.entries[b].sample_id;
              });
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[sample_uniform(i, rng)]);
    }
    const auto counts = split_counts(members.size(), config.train_fraction,
                                     config.val_fraction);
    std::size_t cursor = 0;
    for (int k = 0; k < 3; ++k) {
      for (std::size_t j = 0; j < counts[k]; ++j, ++cursor) {
        manifest.entries[members[cursor]].split = static_cast<Split>(k);
      }
    }
  }
  return manifest;
}

void write_manifest_csv(const DatasetManifest& manifest,
                        const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest: " + path);
  out << "sample_id,path,label,split\n";
  for (const auto& e : manifest.entries) {
    out << e.sample_id << ',' << e.path << ',' << e.label << ','
        << to_string(e.split) << '\n';
  }
}

}  // namespace vulngraph::pipeline
