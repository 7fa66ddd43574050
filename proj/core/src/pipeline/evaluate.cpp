#include "vulngraph/pipeline/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "vulngraph/common/error.hpp"

namespace vulngraph::pipeline {

Metrics compute_metrics(const std::vector<int>& labels,
                        const std::vector<double>& probs) {
  if (labels.size() != probs.size()) {
    throw DomainError("labels and probabilities differ in length");
  }
  Metrics m;
  m.calibration.resize(10);
  std::vector<double> bin_pred_sum(10, 0.0);
  std::vector<std::size_t> bin_pos(10, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = probs[i] >= 0.5 ? 1 : 0;
    if (pred == 1 && labels[i] == 1) ++m.tp;
    if (pred == 0 && labels[i] == 0) ++m.tn;
    if (pred == 1 && labels[i] == 0) ++m.fp;
    if (pred == 0 && labels[i] == 1) ++m.fn;
    auto bin = static_cast<std::size_t>(probs[i] * 10.0);
    bin = std::min<std::size_t>(bin, 9);
    ++m.calibration[bin].count;
    bin_pred_sum[bin] += probs[i];
    if (labels[i] == 1) ++bin_pos[bin];
  }
  const std::size_t n = labels.size();
  m.accuracy = n == 0 ? 0.0
                      : static_cast<double>(m.tp + m.tn) /
                            static_cast<double>(n);
  m.precision = (m.tp + m.fp) == 0 ? 0.0
                                   : static_cast<double>(m.tp) /
                                         static_cast<double>(m.tp + m.fp);
  m.recall = (m.tp + m.fn) == 0 ? 0.0
                                : static_cast<double>(m.tp) /
                                      static_cast<double>(m.tp + m.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  for (std::size_t b = 0; b < 10; ++b) {
    auto& bin = m.calibration[b];
    if (bin.count > 0) {
      bin.mean_pred = bin_pred_sum[b] / static_cast<double>(bin.count);
      bin.frac_positive =
          static_cast<double>(bin_pos[b]) / static_cast<double>(bin.count);
    }
  }
  return m;
}

std::pair<std::vector<int>, std::vector<double>> predict_files(
    const VulnModel& model, const PreparedCorpus& corpus, Split split) {
  const auto indices = corpus.of_split(split);
  // file_index -> (label, max method prob); map keeps ascending file order
  std::map<std::size_t, std::pair<int, double>> files;
  constexpr std::size_t kEvalBatch = 64;
  for (std::size_t start = 0; start < indices.size(); start += kEvalBatch) {
    const std::size_t end = std::min(indices.size(), start + kEvalBatch);
    const std::vector<std::size_t> batch(indices.begin() + start,
                                         indices.begin() + end);
    const auto out = model_forward(model, corpus, batch, false);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& sample = corpus.samples[batch[i]];
      const double prob = out.fused.prob.at(i, 0);
      auto [it, inserted] = files.try_emplace(
          sample.file_index, static_cast<int>(sample.label), prob);
      if (!inserted) it->second.second = std::max(it->second.second, prob);
    }
  }
  std::pair<std::vector<int>, std::vector<double>> result;
  for (const auto& [file_index, entry] : files) {
    result.first.push_back(entry.first);
    result.second.push_back(entry.second);
  }
  return result;
}

Metrics evaluate_split(const VulnModel& model, const PreparedCorpus& corpus,
                       Split split) {
  const auto [labels, probs] = predict_files(model, corpus, split);
  return compute_metrics(labels, probs);
}

namespace {

std::string fixed6(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << v;
  return out.str();
}

}  // namespace

void write_metrics_csv(const Metrics& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write metrics: " + path);
  out << "metric,value\n";
  out << "accuracy," << fixed6(m.accuracy) << '\n';
  out << "precision," << fixed6(m.precision) << '\n';
  out << "recall," << fixed6(m.recall) << '\n';
  out << "f1," << fixed6(m.f1) << '\n';
  out << "tp," << m.tp << '\n';
  out << "tn," << m.tn << '\n';
  out << "fp," << m.fp << '\n';
  out << "fn," << m.fn << '\n';
}

void write_calibration_csv(const Metrics& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write calibration: " + path);
  out << "bin,count,mean_pred,frac_positive\n";
  for (std::size_t b = 0; b < m.calibration.size(); ++b) {
    const auto& bin = m.calibration[b];
    out << b << ',' << bin.count << ',' << fixed6(bin.mean_pred) << ','
        << fixed6(bin.frac_positive) << '\n';
  }
}

}  // namespace vulngraph::pipeline
