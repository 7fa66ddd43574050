#include "vulngraph/pipeline/ablate.hpp"

#include <iomanip>
#include <sstream>

#include "vulngraph/common/log.hpp"
#include "vulngraph/pipeline/evaluate.hpp"

namespace vulngraph::pipeline {

namespace {

std::string pct2(double fraction) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << fraction * 100.0;
  return out.str();
}

}  // namespace

std::string AblationTable::to_markdown() const {
  std::ostringstream out;
  out << "| Model Variant | Accuracy (%) | Drop By |\n";
  out << "|---|---|---|\n";
  const double full = rows.empty() ? 0.0 : rows.front().mean_accuracy;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << "| " << rows[i].variant << " | " << pct2(rows[i].mean_accuracy)
        << " | ";
    if (i == 0) {
      out << "–";
    } else {
      out << pct2(full - rows[i].mean_accuracy);
    }
    out << " |\n";
  }
  return out.str();
}

std::string AblationTable::to_csv() const {
  std::size_t seeds = 0;
  for (const auto& r : rows) seeds = std::max(seeds, r.per_seed_accuracy.size());
  std::ostringstream out;
  out << "variant,accuracy_pct,drop_pct";
  for (std::size_t s = 0; s < seeds; ++s) out << ",seed_" << s << "_pct";
  out << '\n';
  const double full = rows.empty() ? 0.0 : rows.front().mean_accuracy;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].variant << ',' << pct2(rows[i].mean_accuracy) << ',';
    if (i == 0) {
      out << '-';
    } else {
      out << pct2(full - rows[i].mean_accuracy);
    }
    for (const double acc : rows[i].per_seed_accuracy) out << ',' << pct2(acc);
    out << '\n';
  }
  return out.str();
}

AblationTable ablate(const PreparedCorpus& corpus, const TrainConfig& base,
                     const std::vector<std::uint64_t>& seeds) {
  struct Variant {
    const char* name;
    void (*apply)(TrainConfig&);
  };
  static const Variant kVariants[] = {
      {"Full (Graph + Semantics + Losses)", [](TrainConfig&) {}},
      {"No Graphs", [](TrainConfig& c) { c.zero_graph = true; }},
      {"No Semantics", [](TrainConfig& c) { c.zero_semantics = true; }},
      {"No InfoNCE", [](TrainConfig& c) { c.loss.lambda_nce = 0.0; }},
      {"No Laplacian", [](TrainConfig& c) { c.loss.lambda_lap = 0.0; }},
  };

  AblationTable table;
  for (const auto& variant : kVariants) {
    AblationRow row;
    row.variant = variant.name;
    row.config = base;
    variant.apply(row.config);
    for (const std::uint64_t seed : seeds) {
      TrainConfig run = row.config;
      run.seed = seed;
      const auto result = train(corpus, run);
      const auto metrics = evaluate_split(result.model, corpus, Split::Val);
      row.per_seed_accuracy.push_back(metrics.accuracy);
      log::info("ablate", row.variant + " seed " + std::to_string(seed) +
                              ": val acc " + pct2(metrics.accuracy) + "%");
    }
    double sum = 0.0;
    for (const double a : row.per_seed_accuracy) sum += a;
    row.mean_accuracy =
        row.per_seed_accuracy.empty()
            ? 0.0
            : sum / static_cast<double>(row.per_seed_accuracy.size());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace vulngraph::pipeline
