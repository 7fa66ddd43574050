#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vulngraph::pipeline {

enum class Split { Train, Val, Test };
std::string_view to_string(Split s);
Split split_from_string(std::string_view s);  // ConfigError

struct SampleEntry {
  std::string path;       // relative to the corpus root
  std::string sample_id;  // content hash of the file bytes
  int label = 0;          // 0 safe, 1 vulnerable
  Split split = Split::Train;
  std::string source;     // file contents, kept for downstream stages
};

struct DatasetManifest {
  std::vector<SampleEntry> entries;
  std::size_t duplicates_dropped = 0;
  std::size_t unparsable_dropped = 0;

  std::vector<std::size_t> indices(Split s) const;
  std::size_t count(Split s, int label) const;
};

struct IngestConfig {
  double train_fraction = 0.70;
  double val_fraction = 0.15;  // test gets the remainder
  std::uint64_t seed = 0;
};

/// Walks root_dir for .java files, applies the labels file, hashes
/// contents, drops byte-identical duplicates and files our parser finds
/// no methods in, then assigns a seeded stratified split.
///
/// Labels file: CSV lines `path,label` (optional `path,label` header)
/// or JSONL objects {"path": ..., "label": ...}, chosen by extension.
/// Paths are relative to root_dir; labels may be 0/1 or safe/vulnerable.
///
/// Per-class split sizes use largest-remainder rounding with ties
/// resolved in train > val > test order (3 samples at 70/15/15 give
/// 2/1/0).
DatasetManifest ingest(const std::string& root_dir,
                       const std::string& labels_file,
                       const IngestConfig& config = IngestConfig());

/// `sample_id,path,label,split` rows, entries in manifest order.
void write_manifest_csv(const DatasetManifest& manifest,
                        const std::string& path);

}  // namespace vulngraph::pipeline
