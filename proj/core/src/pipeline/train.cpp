#include "vulngraph/pipeline/train.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/log.hpp"
#include "vulngraph/common/rng.hpp"
#include "vulngraph/fusion/checkpoint.hpp"
#include "vulngraph/javacfg/parser.hpp"
#include "vulngraph/tensor/adam.hpp"

namespace vulngraph::pipeline {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) {
    throw ConfigError("epochs and batch size must be positive");
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw ConfigError("learning rate must be positive and finite");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (zero_graph && zero_semantics) {
    throw ConfigError("cannot ablate both modalities at once");
  }
  if (zero_graph && fusion.kind == fusion::FusionKind::CrossAttention) {
    throw ConfigError("cross-attention fusion cannot run without graphs");
  }
  loss.validate();
}

namespace {

void require_known_keys(const json& obj, std::initializer_list<const char*> keys,
                        const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
          return key == k;
        }) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "' in " + where);
    }
  }
}

}  // namespace

std::string serialize_config(const TrainConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["lr"] = c.lr;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["auto_pos_weight"] = c.auto_pos_weight;
  j["zero_graph"] = c.zero_graph;
  j["zero_semantics"] = c.zero_semantics;
  j["encoder"] = {{"kind", std::string(encoders::to_string(c.encoder.kind))},
                  {"d_in", c.encoder.d_in},
                  {"hidden", c.encoder.hidden},
                  {"d_out", c.encoder.d_out},
                  {"layers", c.encoder.layers},
                  {"heads", c.encoder.heads}};
  j["fusion"] = {
      {"kind", std::string(fusion::to_string(c.fusion.kind))},
      {"d_lang", c.fusion.d_lang},
      {"d_proj", c.fusion.d_proj},
      {"activation", std::string(fusion::to_string(c.fusion.activation))},
      {"combine", std::string(fusion::to_string(c.fusion.combine))},
      {"mlp_hidden", c.fusion.mlp_hidden},
      {"force_concat_classifier", c.fusion.force_concat_classifier}};
  j["loss"] = {{"lambda_nce", c.loss.lambda_nce},
               {"lambda_lap", c.loss.lambda_lap},
               {"tau", c.loss.tau},
               {"pos_weight", c.loss.pos_weight}};
  return j.dump();
}

TrainConfig parse_config(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("config is not a JSON object");
  }
  require_known_keys(j,
                     {"epochs", "batch_size", "lr", "beta1", "beta2",
                      "patience", "seed", "auto_pos_weight", "zero_graph",
                      "zero_semantics", "encoder", "fusion", "loss"},
                     "config");
  TrainConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.patience = j.value("patience", c.patience);
    c.seed = j.value("seed", c.seed);
    c.auto_pos_weight = j.value("auto_pos_weight", c.auto_pos_weight);
    c.zero_graph = j.value("zero_graph", c.zero_graph);
    c.zero_semantics = j.value("zero_semantics", c.zero_semantics);
    if (j.contains("encoder")) {
      const json& e = j["encoder"];
      require_known_keys(e, {"kind", "d_in", "hidden", "d_out", "layers",
                             "heads"},
                         "encoder");
      if (e.contains("kind")) {
        c.encoder.kind =
            encoders::encoder_kind_from_string(e["kind"].get<std::string>());
      }
      c.encoder.d_in = e.value("d_in", c.encoder.d_in);
      c.encoder.hidden = e.value("hidden", c.encoder.hidden);
      c.encoder.d_out = e.value("d_out", c.encoder.d_out);
      c.encoder.layers = e.value("layers", c.encoder.layers);
      c.encoder.heads = e.value("heads", c.encoder.heads);
    }
    if (j.contains("fusion")) {
      const json& f = j["fusion"];
      require_known_keys(f,
                         {"kind", "d_lang", "d_proj", "activation", "combine",
                          "mlp_hidden", "force_concat_classifier"},
                         "fusion");
      if (f.contains("kind")) {
        c.fusion.kind =
            fusion::fusion_kind_from_string(f["kind"].get<std::string>());
      }
      c.fusion.d_lang = f.value("d_lang", c.fusion.d_lang);
      c.fusion.d_proj = f.value("d_proj", c.fusion.d_proj);
      if (f.contains("activation")) {
        c.fusion.activation = fusion::activation_from_string(
            f["activation"].get<std::string>());
      }
      if (f.contains("combine")) {
        c.fusion.combine =
            fusion::combine_mode_from_string(f["combine"].get<std::string>());
      }
      if (f.contains("mlp_hidden")) {
        c.fusion.mlp_hidden =
            f["mlp_hidden"].get<std::vector<std::size_t>>();
      }
      c.fusion.force_concat_classifier =
          f.value("force_concat_classifier", c.fusion.force_concat_classifier);
    }
    if (j.contains("loss")) {
      const json& l = j["loss"];
      require_known_keys(l, {"lambda_nce", "lambda_lap", "tau", "pos_weight"},
                         "loss");
      c.loss.lambda_nce = l.value("lambda_nce", c.loss.lambda_nce);
      c.loss.lambda_lap = l.value("lambda_lap", c.loss.lambda_lap);
      c.loss.tau = l.value("tau", c.loss.tau);
      c.loss.pos_weight = l.value("pos_weight", c.loss.pos_weight);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::vector<std::size_t> PreparedCorpus::of_split(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].split == s) out.push_back(i);
  }
  return out;
}

PreparedCorpus prepare_corpus(const DatasetManifest& manifest,
                              const encoders::GraphEncoder& encoder,
                              semantic::SemanticProvider& provider) {
  PreparedCorpus corpus;
  for (std::size_t file_index = 0; file_index < manifest.entries.size();
       ++file_index) {
    const auto& entry = manifest.entries[file_index];
    const auto methods = javacfg::parse_java(entry.source);
    for (const auto& method : methods) {
      PreparedSample s;
      s.sample_id = entry.sample_id;
      s.method_name = method.name;
      s.file_index = file_index;
      s.label = static_cast<double>(entry.label);
      s.split = entry.split;
      s.source = method.source;
      s.cfg = javacfg::build_cfg(method);
      s.graph = encoder.prepare(s.cfg);
      try {
        s.lang = provider.embed(method.source);
      } catch (const ProviderUnavailableError& e) {
        throw ProviderUnavailableError(std::string(e.what()) + " (sample " +
                                       entry.sample_id + ")");
      }
      if (corpus.d_lang == 0) {
        corpus.d_lang = s.lang.size();
      } else if (s.lang.size() != corpus.d_lang) {
        throw DimensionMismatchError(corpus.d_lang, s.lang.size());
      }
      corpus.samples.push_back(std::move(s));
    }
  }
  if (corpus.samples.empty()) {
    throw EmptyCorpusError("manifest produced no methods");
  }
  return corpus;
}

namespace {

encoders::EncoderConfig derive_encoder_config(const TrainConfig& c) {
  encoders::EncoderConfig e = c.encoder;
  e.seed = c.seed;
  return e;
}

fusion::FusionConfig derive_fusion_config(const TrainConfig& c) {
  fusion::FusionConfig f = c.fusion;
  f.d_graph = c.encoder.d_out;
  f.seed = c.seed + 1;
  return f;
}

}  // namespace

VulnModel::VulnModel(const TrainConfig& config)
    : encoder(derive_encoder_config(config)),
      fusion(derive_fusion_config(config)),
      zero_graph(config.zero_graph),
      zero_semantics(config.zero_semantics) {}

fusion::GateMode VulnModel::gate_mode() const {
  if (zero_graph) return fusion::GateMode::SemanticsOnly;
  if (zero_semantics) return fusion::GateMode::GraphOnly;
  return fusion::GateMode::Learned;
}

encoders::Params VulnModel::params() const {
  encoders::Params out;
  for (auto& [name, t] : encoder.params()) out.emplace_back("enc." + name, t);
  for (auto& [name, t] : fusion.params()) out.emplace_back("fus." + name, t);
  return out;
}

BatchOutput model_forward(const VulnModel& model, const PreparedCorpus& corpus,
                          const std::vector<std::size_t>& batch,
                          bool want_node_projections) {
  const std::size_t n = batch.size();
  const auto& fcfg = model.fusion.config();
  const bool cross = fcfg.kind == fusion::FusionKind::CrossAttention;

  Tensor l_hat;
  if (model.zero_semantics) {
    l_hat = Tensor::zeros({n, fcfg.d_proj});
  } else {
    std::vector<double> flat;
    flat.reserve(n * corpus.d_lang);
    for (std::size_t idx : batch) {
      const auto& lang = corpus.samples[idx].lang;
      flat.insert(flat.end(), lang.begin(), lang.end());
    }
    const Tensor h_lang = Tensor::from_data({n, corpus.d_lang}, std::move(flat));
    l_hat = model.fusion.lang_head().forward(h_lang);
  }

  BatchOutput out;
  Tensor g_hat;
  if (model.zero_graph) {
    g_hat = Tensor::zeros({n, fcfg.d_proj});
  } else {
    std::vector<Tensor> pooled;
    pooled.reserve(n);
    for (std::size_t idx : batch) {
      const Tensor nodes =
          model.encoder.encode_nodes(corpus.samples[idx].graph);
      pooled.push_back(mean_rows(nodes));
      if (want_node_projections || cross) {
        out.projected_nodes.push_back(model.fusion.graph_head().forward(nodes));
      }
    }
    g_hat = model.fusion.graph_head().forward(concat_rows(pooled));
  }

  out.fused = model.fusion.forward_projected(g_hat, l_hat, model.gate_mode(),
                                             out.projected_nodes);
  return out;
}

namespace {

struct BatchLoss {
  Tensor total;
  std::size_t correct = 0;
};

BatchLoss batch_objective(const VulnModel& model, const PreparedCorpus& corpus,
                          const std::vector<std::size_t>& batch,
                          const objectives::LossConfig& loss_cfg,
                          double pos_weight) {
  const bool both_modalities = !model.zero_graph && !model.zero_semantics;
  const bool want_lap = loss_cfg.lambda_lap > 0.0 && !model.zero_graph;
  auto out = model_forward(model, corpus, batch, want_lap);

  std::vector<double> labels;
  labels.reserve(batch.size());
  for (std::size_t idx : batch) labels.push_back(corpus.samples[idx].label);

  objectives::LossParts parts;
  parts.cls = objectives::bce(out.fused.logits, labels, pos_weight);
  if (loss_cfg.lambda_nce > 0.0 && both_modalities) {
    parts.nce = objectives::info_nce(out.fused.g_hat, out.fused.l_hat,
                                     loss_cfg.tau);
  }
  if (want_lap) {
    std::vector<std::vector<graph::Edge>> edges;
    edges.reserve(batch.size());
    for (std::size_t idx : batch) {
      edges.push_back(corpus.samples[idx].graph.edges);
    }
    parts.lap = objectives::laplacian_reg(out.projected_nodes, edges);
  }

  BatchLoss result;
  result.total = objectives::total_loss(parts, loss_cfg);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int pred = out.fused.prob.at(i, 0) >= 0.5 ? 1 : 0;
    if (pred == static_cast<int>(labels[i])) ++result.correct;
  }
  return result;
}

// Fills batches in order, never repeating a sample_id inside one batch.
std::vector<std::vector<std::size_t>> pack_batches(
    const std::vector<std::size_t>& order, std::size_t batch_size,
    const PreparedCorpus& corpus) {
  std::vector<char> used(order.size(), 0);
  std::size_t remaining = order.size();
  std::vector<std::vector<std::size_t>> batches;
  while (remaining > 0) {
    std::vector<std::size_t> batch;
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < order.size() && batch.size() < batch_size;
         ++i) {
      if (used[i]) continue;
      if (!ids.insert(corpus.samples[order[i]].sample_id).second) continue;
      batch.push_back(order[i]);
      used[i] = 1;
      --remaining;
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

struct SplitEval {
  double loss = 0.0;
  double accuracy = 0.0;
};

SplitEval eval_split_methods(const VulnModel& model,
                             const PreparedCorpus& corpus,
                             const std::vector<std::size_t>& indices,
                             std::size_t batch_size,
                             const objectives::LossConfig& loss_cfg,
                             double pos_weight) {
  SplitEval eval;
  if (indices.empty()) return eval;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const std::size_t end = std::min(indices.size(), start + batch_size);
    const std::vector<std::size_t> batch(indices.begin() + start,
                                         indices.begin() + end);
    auto bl = batch_objective(model, corpus, batch, loss_cfg, pos_weight);
    loss_sum += bl.total.value() * static_cast<double>(batch.size());
    correct += bl.correct;
  }
  eval.loss = loss_sum / static_cast<double>(indices.size());
  eval.accuracy =
      static_cast<double>(correct) / static_cast<double>(indices.size());
  return eval;
}

}  // namespace

void write_history_jsonl(const std::vector<EpochRecord>& history,
                         const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write history: " + path);
  for (const auto& r : history) {
    json j;
    j["epoch"] = r.epoch;
    j["train_loss"] = r.train_loss;
    j["train_accuracy"] = r.train_accuracy;
    j["val_loss"] = r.val_loss;
    j["val_accuracy"] = r.val_accuracy;
    out << j.dump() << '\n';
  }
}

TrainResult train(const PreparedCorpus& corpus, const TrainConfig& config) {
  config.validate();
  if (!config.zero_semantics && config.fusion.d_lang != corpus.d_lang) {
    throw DimensionMismatchError(config.fusion.d_lang, corpus.d_lang);
  }

  const auto train_idx = corpus.of_split(Split::Train);
  const auto val_idx = corpus.of_split(Split::Val);
  if (train_idx.empty()) throw EmptyCorpusError("no training samples");

  double pos_weight = config.loss.pos_weight;
  if (config.auto_pos_weight) {
    std::size_t pos = 0;
    for (std::size_t idx : train_idx) {
      if (corpus.samples[idx].label > 0.5) ++pos;
    }
    const std::size_t neg = train_idx.size() - pos;
    pos_weight = (pos > 0 && neg > 0)
                     ? static_cast<double>(neg) / static_cast<double>(pos)
                     : 1.0;
  }

  TrainResult result{VulnModel(config), {}, 0, 0.0, pos_weight};
  VulnModel& model = result.model;

  std::vector<Tensor> param_tensors;
  for (auto& [name, t] : model.params()) param_tensors.push_back(t);
  tensor::Adam::Options opts;
  opts.lr = config.lr;
  opts.beta1 = config.beta1;
  opts.beta2 = config.beta2;
  tensor::Adam optimizer(param_tensors, opts);

  std::mt19937_64 shuffle_rng(config.seed + 2);
  std::vector<std::size_t> order = train_idx;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_values;
  std::size_t since_best = 0;

  auto snapshot = [&] {
    best_values.clear();
    for (const Tensor& t : param_tensors) {
      best_values.emplace_back(t.data().begin(), t.data().end());
    }
  };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[sample_uniform(i, shuffle_rng)]);
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (const auto& batch :
         pack_batches(order, config.batch_size, corpus)) {
      auto bl = batch_objective(model, corpus, batch, config.loss, pos_weight);
      optimizer.zero_grad();
      bl.total.backward();
      optimizer.step();
      loss_sum += bl.total.value() * static_cast<double>(batch.size());
      correct += bl.correct;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(order.size());
    const auto val = eval_split_methods(model, corpus, val_idx,
                                        config.batch_size, config.loss,
                                        pos_weight);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    result.history.push_back(rec);

    if (!val_idx.empty()) {
      if (val.loss < best_val - 1e-12) {
        best_val = val.loss;
        result.best_epoch = epoch;
        result.best_val_loss = val.loss;
        since_best = 0;
        snapshot();
      } else {
        ++since_best;
        if (config.patience > 0 && since_best >= config.patience) {
          log::info("train", "early stop at epoch " + std::to_string(epoch));
          break;
        }
      }
    }
  }

  if (!best_values.empty()) {
    for (std::size_t i = 0; i < param_tensors.size(); ++i) {
      auto dst = param_tensors[i].mutable_data();
      std::copy(best_values[i].begin(), best_values[i].end(), dst.begin());
    }
  } else {
    result.best_epoch = result.history.size();
    result.best_val_loss =
        result.history.empty() ? 0.0 : result.history.back().val_loss;
  }
  return result;
}

void save_model(const std::string& path, const VulnModel& model,
                const TrainConfig& config) {
  fusion::save_checkpoint(path, serialize_config(config), model.params());
}

LoadedModel load_model(const std::string& path) {
  auto ckpt = fusion::load_checkpoint(path);
  TrainConfig config = parse_config(ckpt.meta);
  LoadedModel loaded{VulnModel(config), config};
  auto params = loaded.model.params();
  fusion::load_into(ckpt, params);
  return loaded;
}

}  // namespace vulngraph::pipeline
