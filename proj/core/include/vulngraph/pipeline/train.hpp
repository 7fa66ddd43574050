#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vulngraph/encoders/encoder.hpp"
#include "vulngraph/fusion/fusion.hpp"
#include "vulngraph/javacfg/cfg.hpp"
#include "vulngraph/objectives/losses.hpp"
#include "vulngraph/pipeline/dataset.hpp"
#include "vulngraph/semantic/provider.hpp"

namespace vulngraph::pipeline {

using tensor::Tensor;

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::size_t patience = 8;  // early stopping on val loss; 0 disables
  std::uint64_t seed = 0;
  bool auto_pos_weight = true;  // pos_weight = N_neg/N_pos on train methods

  encoders::EncoderConfig encoder;
  fusion::FusionConfig fusion;
  objectives::LossConfig loss;

  // ablation switches ("No Graphs" / "No Semantics")
  bool zero_graph = false;      // g_hat := 0, gate pinned to a_l = 1
  bool zero_semantics = false;  // l_hat := 0, gate pinned to a_g = 1

  void validate() const;  // ConfigError
};

/// Round-trip the config through sorted-key JSON (config files,
/// checkpoint meta).
std::string serialize_config(const TrainConfig& config);
TrainConfig parse_config(const std::string& json_text);  // ConfigError

/// One training instance: a method-level CFG carrying its file's label.
struct PreparedSample {
  std::string sample_id;  // file content hash (shared by the file's methods)
  std::string method_name;
  std::size_t file_index = 0;  // position in the manifest
  double label = 0.0;
  Split split = Split::Train;
  std::string source;  // method source slice (prompts, zero-shot)
  javacfg::Cfg cfg;    // kept for explanations
  encoders::PreparedGraph graph;
  std::vector<double> lang;  // provider embedding of the method source
};

struct PreparedCorpus {
  std::vector<PreparedSample> samples;
  std::size_t d_lang = 0;

  std::vector<std::size_t> of_split(Split s) const;
};

/// Extracts per-method CFGs, runs encoder-side precomputation and
/// fetches one provider embedding per method. Provider failures are
/// rethrown with the owning sample id attached.
PreparedCorpus prepare_corpus(const DatasetManifest& manifest,
                              const encoders::GraphEncoder& encoder,
                              semantic::SemanticProvider& provider);

/// Encoder + fusion pair with the ablation flags baked in. Seeds are
/// derived from TrainConfig::seed (encoder: seed, fusion: seed + 1).
struct VulnModel {
  explicit VulnModel(const TrainConfig& config);

  encoders::GraphEncoder encoder;
  fusion::FusionModel fusion;
  bool zero_graph = false;
  bool zero_semantics = false;

  fusion::GateMode gate_mode() const;
  encoders::Params params() const;  // "enc." and "fus." prefixed
};

struct BatchOutput {
  fusion::FusedBatch fused;
  std::vector<Tensor> projected_nodes;  // filled only when requested
};

/// Shared forward pass over a batch of prepared samples. Node
/// projections (graph projection head applied to node-level encoder
/// states) are needed by the Laplacian term and cross-attention.
BatchOutput model_forward(const VulnModel& model, const PreparedCorpus& corpus,
                          const std::vector<std::size_t>& batch,
                          bool want_node_projections);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;  // method-level
  double val_loss = 0.0;
  double val_accuracy = 0.0;  // method-level
};

/// One JSON object per epoch.
void write_history_jsonl(const std::vector<EpochRecord>& history,
                         const std::string& path);

struct TrainResult {
  VulnModel model;  // parameters restored to the best-val epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_loss = 0.0;
  double pos_weight = 1.0;  // the value actually used
};

TrainResult train(const PreparedCorpus& corpus, const TrainConfig& config);

/// Full-model checkpoint: every named parameter plus the serialized
/// config as meta.
void save_model(const std::string& path, const VulnModel& model,
                const TrainConfig& config);

struct LoadedModel {
  VulnModel model;
  TrainConfig config;
};

LoadedModel load_model(const std::string& path);

}  // namespace vulngraph::pipeline
