#pragma once

#include <string>
#include <vector>

#include "vulngraph/pipeline/train.hpp"

namespace vulngraph::pipeline {

struct CalibrationBin {
  std::size_t count = 0;
  double mean_pred = 0.0;
  double frac_positive = 0.0;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::vector<CalibrationBin> calibration;  // 10 equal-width bins over [0,1]
};

/// Threshold 0.5; the 0/0 cases of precision/recall/F1 read as 0.
Metrics compute_metrics(const std::vector<int>& labels,
                        const std::vector<double>& probs);

/// File-level probabilities for one split: a file's score is the max
/// over its methods' probabilities. Returned in ascending file order,
/// paired with the file labels.
std::pair<std::vector<int>, std::vector<double>> predict_files(
    const VulnModel& model, const PreparedCorpus& corpus, Split split);

/// File-level metrics on a split.
Metrics evaluate_split(const VulnModel& model, const PreparedCorpus& corpus,
                       Split split);

/// `metric,value` rows with fixed 6-decimal formatting (deterministic).
void write_metrics_csv(const Metrics& metrics, const std::string& path);

/// `bin,count,mean_pred,frac_positive` rows.
void write_calibration_csv(const Metrics& metrics, const std::string& path);

}  // namespace vulngraph::pipeline
