#pragma once

#include <string>
#include <vector>

#include "vulngraph/pipeline/train.hpp"

namespace vulngraph::pipeline {

struct AblationRow {
  std::string variant;
  TrainConfig config;  // the resolved config this variant ran with
  std::vector<double> per_seed_accuracy;  // file-level val accuracy
  double mean_accuracy = 0.0;             // fraction in [0,1]
};

struct AblationTable {
  std::vector<AblationRow> rows;  // full model first

  /// Markdown shaped like the fusion-ablation table: variant,
  /// accuracy %, drop vs. the full row ("–" for the full row itself).
  std::string to_markdown() const;
  std::string to_csv() const;
};

/// Trains {Full, No Graphs, No Semantics, No InfoNCE, No Laplacian}
/// once per seed and reports mean file-level validation accuracy.
AblationTable ablate(const PreparedCorpus& corpus, const TrainConfig& base,
                     const std::vector<std::uint64_t>& seeds);

}  // namespace vulngraph::pipeline
