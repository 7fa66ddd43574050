#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/log.hpp"
#include "vulngraph/explain/explain.hpp"
#include "vulngraph/javacfg/export.hpp"
#include "vulngraph/javacfg/parser.hpp"
#include "vulngraph/pipeline/ablate.hpp"
#include "vulngraph/pipeline/dataset.hpp"
#include "vulngraph/pipeline/evaluate.hpp"
#include "vulngraph/pipeline/gen_corpus.hpp"
#include "vulngraph/pipeline/train.hpp"
#include "vulngraph/semantic/provider.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vulngraph;

namespace {

struct ProviderSettings {
  std::string kind = "stub";  // stub | file | http
  std::size_t dim = 256;      // stub embedding width
  std::string cache;          // embedding cache path (required for file)
  std::string endpoint;       // host:port for http
  std::string model = "code-embed";
};

struct IngestSettings {
  double train_fraction = 0.70;
  double val_fraction = 0.15;
  std::uint64_t seed = 0;
};

struct RunSettings {
  pipeline::TrainConfig train;
  ProviderSettings provider;
  IngestSettings ingest;
};

// config file: {"train": {...}, "provider": {...}, "ingest": {...}}
RunSettings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("config file is not a JSON object: " + path);
  }
  RunSettings s;
  for (const auto& [key, value] : j.items()) {
    if (key == "train") {
      s.train = pipeline::parse_config(value.dump());
    } else if (key == "provider") {
      for (const auto& [pk, pv] : value.items()) {
        try {
          if (pk == "kind") s.provider.kind = pv.get<std::string>();
          else if (pk == "dim") s.provider.dim = pv.get<std::size_t>();
          else if (pk == "cache") s.provider.cache = pv.get<std::string>();
          else if (pk == "endpoint") s.provider.endpoint = pv.get<std::string>();
          else if (pk == "model") s.provider.model = pv.get<std::string>();
          else throw ConfigError("unknown provider key '" + pk + "'");
        } catch (const json::exception& e) {
          throw ConfigError("bad provider." + pk + ": " + e.what());
        }
      }
    } else if (key == "ingest") {
      for (const auto& [ik, iv] : value.items()) {
        try {
          if (ik == "train_fraction") s.ingest.train_fraction = iv.get<double>();
          else if (ik == "val_fraction") s.ingest.val_fraction = iv.get<double>();
          else if (ik == "seed") s.ingest.seed = iv.get<std::uint64_t>();
          else throw ConfigError("unknown ingest key '" + ik + "'");
        } catch (const json::exception& e) {
          throw ConfigError("bad ingest." + ik + ": " + e.what());
        }
      }
    } else {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  return s;
}

json settings_json(const RunSettings& s) {
  json j;
  j["train"] = json::parse(pipeline::serialize_config(s.train));
  j["provider"] = {{"kind", s.provider.kind},
                   {"dim", s.provider.dim},
                   {"cache", s.provider.cache},
                   {"endpoint", s.provider.endpoint},
                   {"model", s.provider.model}};
  j["ingest"] = {{"train_fraction", s.ingest.train_fraction},
                 {"val_fraction", s.ingest.val_fraction},
                 {"seed", s.ingest.seed}};
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// every command owns an output directory; refuse reuse without --force
fs::path claim_dir(const std::string& dir, bool force) {
  fs::path p(dir);
  if (fs::exists(p) && !fs::is_empty(p) && !force) {
    throw ConfigError("output directory '" + dir +
                      "' is not empty; pass --force to reuse it");
  }
  fs::create_directories(p);
  return p;
}

void write_resolved_config(const fs::path& run_dir, const RunSettings& s,
                           const json& paths) {
  json j = settings_json(s);
  j["paths"] = paths;
  write_text(run_dir / "config.json", j.dump(2) + "\n");
}

struct ProviderHandle {
  std::shared_ptr<semantic::SemanticProvider> provider;
  std::shared_ptr<semantic::CachingProvider> caching;  // null unless wrapped

  semantic::SemanticProvider& get() { return *provider; }
  void persist() const {
    if (caching && !cache_path.empty()) caching->save(cache_path);
  }
  std::string cache_path;
};

ProviderHandle make_provider(const ProviderSettings& ps) {
  ProviderHandle h;
  std::shared_ptr<semantic::SemanticProvider> base;
  if (ps.kind == "stub") {
    base = std::make_shared<semantic::StubProvider>(ps.dim);
  } else if (ps.kind == "file") {
    if (ps.cache.empty()) {
      throw ConfigError("provider kind 'file' needs --cache");
    }
    h.provider = std::make_shared<semantic::FileProvider>(ps.cache);
    return h;
  } else if (ps.kind == "http") {
    const auto colon = ps.endpoint.rfind(':');
    if (colon == std::string::npos) {
      throw ConfigError("--endpoint must be host:port");
    }
    int port = 0;
    try {
      port = std::stoi(ps.endpoint.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad port in --endpoint '" + ps.endpoint + "'");
    }
    base = std::make_shared<semantic::HttpProvider>(
        ps.endpoint.substr(0, colon), port, ps.model);
  } else {
    throw ConfigError("unknown provider kind '" + ps.kind + "'");
  }
  if (!ps.cache.empty()) {
    h.cache_path = ps.cache;
    h.caching = fs::exists(ps.cache)
                    ? std::make_shared<semantic::CachingProvider>(base, ps.cache)
                    : std::make_shared<semantic::CachingProvider>(base);
    h.provider = h.caching;
  } else {
    h.provider = base;
  }
  return h;
}

pipeline::PreparedCorpus load_corpus(const std::string& input,
                                     const std::string& labels,
                                     const RunSettings& s,
                                     semantic::SemanticProvider& provider,
                                     pipeline::DatasetManifest* out_manifest) {
  pipeline::IngestConfig icfg;
  icfg.train_fraction = s.ingest.train_fraction;
  icfg.val_fraction = s.ingest.val_fraction;
  icfg.seed = s.ingest.seed;
  auto manifest = pipeline::ingest(input, labels, icfg);
  log::info("cli", "ingested " + std::to_string(manifest.entries.size()) +
                       " files (" + std::to_string(manifest.duplicates_dropped) +
                       " duplicates, " +
                       std::to_string(manifest.unparsable_dropped) +
                       " unparsable dropped)");
  encoders::EncoderConfig ecfg = s.train.encoder;
  ecfg.seed = s.train.seed;
  encoders::GraphEncoder encoder(ecfg);
  auto corpus = pipeline::prepare_corpus(manifest, encoder, provider);
  log::info("cli",
            "prepared " + std::to_string(corpus.samples.size()) + " methods");
  if (out_manifest) *out_manifest = std::move(manifest);
  return corpus;
}

// flag override hooks, applied over file/default values after parsing
using Applier = std::function<void(RunSettings&)>;

void add_train_flags(CLI::App* cmd, std::vector<Applier>& apply) {
  auto opt = [&](const char* name, auto value, const char* help,
                 auto assign) {
    auto holder = std::make_shared<std::decay_t<decltype(value)>>(value);
    CLI::Option* o = cmd->add_option(name, *holder, help);
    apply.push_back([o, holder, assign](RunSettings& s) {
      if (o->count() > 0) assign(s, *holder);
    });
  };
  opt("--epochs", std::size_t{40}, "training epochs",
      [](RunSettings& s, std::size_t v) { s.train.epochs = v; });
  opt("--batch-size", std::size_t{32}, "methods per batch",
      [](RunSettings& s, std::size_t v) { s.train.batch_size = v; });
  opt("--lr", 1e-3, "Adam learning rate",
      [](RunSettings& s, double v) { s.train.lr = v; });
  opt("--patience", std::size_t{8}, "early-stopping patience (0 disables)",
      [](RunSettings& s, std::size_t v) { s.train.patience = v; });
  opt("--seed", std::uint64_t{0}, "model/shuffle seed",
      [](RunSettings& s, std::uint64_t v) { s.train.seed = v; });
  opt("--encoder", std::string("gcn"), "graph encoder: gcn|gat|sage|node2vec",
      [](RunSettings& s, const std::string& v) {
        s.train.encoder.kind = encoders::encoder_kind_from_string(v);
      });
  opt("--d-in", std::size_t{64}, "node feature width",
      [](RunSettings& s, std::size_t v) { s.train.encoder.d_in = v; });
  opt("--hidden", std::size_t{64}, "encoder hidden width",
      [](RunSettings& s, std::size_t v) { s.train.encoder.hidden = v; });
  opt("--d-out", std::size_t{128}, "graph embedding width",
      [](RunSettings& s, std::size_t v) { s.train.encoder.d_out = v; });
  opt("--layers", std::size_t{2}, "encoder layers",
      [](RunSettings& s, std::size_t v) { s.train.encoder.layers = v; });
  opt("--heads", std::size_t{4}, "GAT attention heads",
      [](RunSettings& s, std::size_t v) { s.train.encoder.heads = v; });
  opt("--fusion", std::string("gating"), "fusion: concat|gating|cross-attention",
      [](RunSettings& s, const std::string& v) {
        s.train.fusion.kind = fusion::fusion_kind_from_string(v);
      });
  opt("--d-lang", std::size_t{256}, "language embedding width",
      [](RunSettings& s, std::size_t v) { s.train.fusion.d_lang = v; });
  opt("--d-proj", std::size_t{128}, "projection width",
      [](RunSettings& s, std::size_t v) { s.train.fusion.d_proj = v; });
  opt("--lambda-nce", 0.1, "InfoNCE weight",
      [](RunSettings& s, double v) { s.train.loss.lambda_nce = v; });
  opt("--lambda-lap", 0.01, "Laplacian smoothness weight",
      [](RunSettings& s, double v) { s.train.loss.lambda_lap = v; });
  opt("--tau", 0.1, "InfoNCE temperature",
      [](RunSettings& s, double v) { s.train.loss.tau = v; });
  opt("--zero-graph", false, "ablation: zero the graph branch",
      [](RunSettings& s, bool v) { s.train.zero_graph = v; });
  opt("--zero-semantics", false, "ablation: zero the semantic branch",
      [](RunSettings& s, bool v) { s.train.zero_semantics = v; });
}

void add_provider_flags(CLI::App* cmd, std::vector<Applier>& apply) {
  auto opt = [&](const char* name, auto value, const char* help,
                 auto assign) {
    auto holder = std::make_shared<std::decay_t<decltype(value)>>(value);
    CLI::Option* o = cmd->add_option(name, *holder, help);
    apply.push_back([o, holder, assign](RunSettings& s) {
      if (o->count() > 0) assign(s, *holder);
    });
  };
  opt("--provider", std::string("stub"), "semantic provider: stub|file|http",
      [](RunSettings& s, const std::string& v) { s.provider.kind = v; });
  opt("--provider-dim", std::size_t{256}, "stub embedding width",
      [](RunSettings& s, std::size_t v) {
        s.provider.dim = v;
        s.train.fusion.d_lang = v;
      });
  opt("--cache", std::string(), "embedding cache file",
      [](RunSettings& s, const std::string& v) { s.provider.cache = v; });
  opt("--endpoint", std::string(), "http provider host:port",
      [](RunSettings& s, const std::string& v) { s.provider.endpoint = v; });
  opt("--model", std::string("code-embed"), "http provider model name",
      [](RunSettings& s, const std::string& v) { s.provider.model = v; });
}

void add_ingest_flags(CLI::App* cmd, std::vector<Applier>& apply) {
  auto opt = [&](const char* name, auto value, const char* help,
                 auto assign) {
    auto holder = std::make_shared<std::decay_t<decltype(value)>>(value);
    CLI::Option* o = cmd->add_option(name, *holder, help);
    apply.push_back([o, holder, assign](RunSettings& s) {
      if (o->count() > 0) assign(s, *holder);
    });
  };
  opt("--train-frac", 0.70, "train split fraction",
      [](RunSettings& s, double v) { s.ingest.train_fraction = v; });
  opt("--val-frac", 0.15, "val split fraction",
      [](RunSettings& s, double v) { s.ingest.val_fraction = v; });
  opt("--split-seed", std::uint64_t{0}, "stratified split seed",
      [](RunSettings& s, std::uint64_t v) { s.ingest.seed = v; });
}

RunSettings resolve(const std::string& config_path,
                    const std::vector<Applier>& apply) {
  RunSettings s;
  if (!config_path.empty()) s = load_settings(config_path);
  for (const auto& f : apply) f(s);
  // stub embeddings must line up with the fusion input width
  if (s.provider.kind == "stub") s.provider.dim = s.train.fusion.d_lang;
  return s;
}

void eval_and_write(const pipeline::VulnModel& model,
                    const pipeline::PreparedCorpus& corpus,
                    pipeline::Split split, const fs::path& run_dir,
                    const std::string& tag) {
  if (corpus.of_split(split).empty()) {
    log::warn("cli", "split '" + std::string(pipeline::to_string(split)) +
                         "' is empty, skipping metrics");
    return;
  }
  const auto metrics = pipeline::evaluate_split(model, corpus, split);
  pipeline::write_metrics_csv(metrics,
                              (run_dir / ("metrics_" + tag + ".csv")).string());
  pipeline::write_calibration_csv(
      metrics, (run_dir / ("calibration_" + tag + ".csv")).string());
  std::ostringstream line;
  line << tag << " accuracy " << metrics.accuracy << " f1 " << metrics.f1;
  log::info("cli", line.str());
}

int run_extract_cfg(const std::string& input, const std::string& out,
                    const std::string& format, bool force) {
  if (format != "dot" && format != "json") {
    throw ConfigError("--format must be dot or json");
  }
  const fs::path out_dir = claim_dir(out, force);
  std::vector<fs::path> files;
  const fs::path root(input);
  if (fs::is_regular_file(root)) {
    files.push_back(root);
  } else if (fs::is_directory(root)) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().extension() == ".java") {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    throw ConfigError("input path '" + input + "' does not exist");
  }
  std::size_t methods = 0;
  for (const auto& file : files) {
    std::ifstream in(file);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto parsed = javacfg::parse_java(buf.str());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      const auto cfg = javacfg::build_cfg(parsed[i]);
      const std::string name = file.stem().string() + "." +
                               std::to_string(i) + "." + parsed[i].name +
                               (format == "dot" ? ".dot" : ".json");
      write_text(out_dir / name, format == "dot" ? javacfg::to_dot(cfg)
                                                 : javacfg::to_json(cfg));
      ++methods;
    }
  }
  json paths = {{"input", input}, {"out", out}, {"format", format}};
  write_text(out_dir / "config.json", paths.dump(2) + "\n");
  std::cout << "extracted " << methods << " control-flow graphs from "
            << files.size() << " files\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vulngraph: graph + semantics vulnerability detection"};
  app.require_subcommand(1);

  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug|info|warn|error");
  unsigned jobs = std::thread::hardware_concurrency();
  app.add_option("--jobs", jobs,
                 "parallelism cap (execution is sequential for determinism)");

  // extract-cfg
  auto* cmd_extract = app.add_subcommand("extract-cfg",
                                         "parse Java and emit per-method CFGs");
  std::string ex_input, ex_out = "runs/extract-cfg", ex_format = "dot";
  bool ex_force = false;
  cmd_extract->add_option("input", ex_input, "Java file or directory")
      ->required();
  cmd_extract->add_option("--out", ex_out, "output directory");
  cmd_extract->add_option("--format", ex_format, "dot|json");
  cmd_extract->add_flag("--force", ex_force, "reuse a non-empty directory");

  struct CorpusCmd {
    CLI::App* cmd = nullptr;
    std::string input, labels, run_dir, config_path;
    bool force = false;
    std::vector<Applier> apply;
  };
  auto add_corpus_cmd = [&](const char* name, const char* help,
                            const char* default_run_dir, bool train_flags) {
    CorpusCmd c;
    c.cmd = app.add_subcommand(name, help);
    c.run_dir = default_run_dir;
    c.cmd->add_option("input", c.input, "corpus root directory")->required();
    c.cmd->add_option("--labels", c.labels, "labels csv/jsonl")->required();
    c.cmd->add_option("--run-dir", c.run_dir, "output directory");
    c.cmd->add_option("--config", c.config_path, "JSON config file");
    c.cmd->add_flag("--force", c.force, "reuse a non-empty run directory");
    if (train_flags) add_train_flags(c.cmd, c.apply);
    add_provider_flags(c.cmd, c.apply);
    add_ingest_flags(c.cmd, c.apply);
    return c;
  };

  CorpusCmd cmd_embed =
      add_corpus_cmd("embed", "fetch and cache method embeddings",
                     "runs/embed", false);
  CorpusCmd cmd_train =
      add_corpus_cmd("train", "train the fusion classifier", "runs/train",
                     true);
  CorpusCmd cmd_eval =
      add_corpus_cmd("evaluate", "evaluate a trained checkpoint",
                     "runs/evaluate", false);
  std::string eval_model, eval_split = "test";
  cmd_eval.cmd->add_option("--model-path", eval_model, "checkpoint file")
      ->required();
  cmd_eval.cmd->add_option("--split", eval_split, "train|val|test");

  CorpusCmd cmd_ablate =
      add_corpus_cmd("ablate", "run the five-variant ablation", "runs/ablate",
                     true);
  std::vector<std::uint64_t> ablate_seeds{0, 1, 2};
  cmd_ablate.cmd->add_option("--seeds", ablate_seeds,
                             "seeds, one run per variant per seed");

  CorpusCmd cmd_explain =
      add_corpus_cmd("explain", "emit reports for a trained checkpoint",
                     "runs/explain", false);
  std::string explain_model, explain_split = "test";
  std::string explain_method = "integrated-gradients";
  std::size_t explain_k = 5, explain_steps = 128;
  bool explain_logit = false, explain_offline = false;
  cmd_explain.cmd->add_option("--model-path", explain_model, "checkpoint file")
      ->required();
  cmd_explain.cmd->add_option("--split", explain_split, "train|val|test");
  cmd_explain.cmd->add_option("--k", explain_k, "salient nodes per report");
  cmd_explain.cmd->add_option("--method", explain_method,
                              "input-gradient|integrated-gradients");
  cmd_explain.cmd->add_option("--steps", explain_steps,
                              "integrated-gradients steps");
  cmd_explain.cmd->add_flag("--logit", explain_logit,
                            "differentiate the logit instead of y-hat");
  cmd_explain.cmd->add_flag("--offline", explain_offline,
                            "skip the provider, use fallback justifications");

  CorpusCmd cmd_zeroshot =
      add_corpus_cmd("zero-shot", "label files with the provider alone",
                     "runs/zero-shot", false);

  auto* cmd_gen = app.add_subcommand("gen-corpus",
                                     "write the synthetic Java corpus");
  std::string gen_out = "corpus";
  std::size_t gen_files = 400;
  std::uint64_t gen_seed = 0;
  bool gen_force = false;
  cmd_gen->add_option("--out", gen_out, "corpus directory");
  cmd_gen->add_option("--files", gen_files, "file count (rounded up to 8)");
  cmd_gen->add_option("--seed", gen_seed, "generation seed");
  cmd_gen->add_flag("--force", gen_force, "reuse a non-empty directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (log_level == "debug") log::set_level(log::Level::debug);
    else if (log_level == "info") log::set_level(log::Level::info);
    else if (log_level == "warn") log::set_level(log::Level::warn);
    else if (log_level == "error") log::set_level(log::Level::error);
    else throw ConfigError("unknown log level '" + log_level + "'");
    if (jobs == 0) throw ConfigError("--jobs must be at least 1");

    if (cmd_extract->parsed()) {
      return run_extract_cfg(ex_input, ex_out, ex_format, ex_force);
    }

    if (cmd_gen->parsed()) {
      const fs::path dir = claim_dir(gen_out, gen_force);
      pipeline::CorpusSpec spec;
      spec.files = gen_files;
      spec.seed = gen_seed;
      const std::size_t n = pipeline::generate_corpus(gen_out, spec);
      std::cout << "wrote " << n << " files under " << dir.string() << "\n";
      return 0;
    }

    auto corpus_paths = [](const CorpusCmd& c) {
      return json{{"input", c.input},
                  {"labels", c.labels},
                  {"run_dir", c.run_dir}};
    };

    if (cmd_embed.cmd->parsed()) {
      RunSettings s = resolve(cmd_embed.config_path, cmd_embed.apply);
      const fs::path run_dir = claim_dir(cmd_embed.run_dir, cmd_embed.force);
      auto handle = make_provider(s.provider);
      // route everything through a cache we can persist
      auto caching = handle.caching
                         ? handle.caching
                         : std::make_shared<semantic::CachingProvider>(
                               handle.provider);
      pipeline::DatasetManifest manifest;
      load_corpus(cmd_embed.input, cmd_embed.labels, s, *caching, &manifest);
      const std::string cache_out = (run_dir / "embeddings.bin").string();
      caching->save(cache_out);
      caching->cache().export_csv((run_dir / "embeddings.csv").string());
      pipeline::write_manifest_csv(manifest,
                                   (run_dir / "manifest.csv").string());
      handle.persist();
      write_resolved_config(run_dir, s, corpus_paths(cmd_embed));
      std::cout << "cached " << caching->cache().size() << " embeddings ("
                << caching->hits() << " hits, " << caching->misses()
                << " misses)\n";
      return 0;
    }

    if (cmd_train.cmd->parsed()) {
      RunSettings s = resolve(cmd_train.config_path, cmd_train.apply);
      s.train.validate();
      const fs::path run_dir = claim_dir(cmd_train.run_dir, cmd_train.force);
      auto handle = make_provider(s.provider);
      pipeline::DatasetManifest manifest;
      const auto corpus = load_corpus(cmd_train.input, cmd_train.labels, s,
                                      handle.get(), &manifest);
      handle.persist();
      const auto result = pipeline::train(corpus, s.train);
      pipeline::write_manifest_csv(manifest,
                                   (run_dir / "manifest.csv").string());
      pipeline::write_history_jsonl(result.history,
                                    (run_dir / "history.jsonl").string());
      pipeline::save_model((run_dir / "model.ckpt").string(), result.model,
                           s.train);
      eval_and_write(result.model, corpus, pipeline::Split::Val, run_dir,
                     "val");
      eval_and_write(result.model, corpus, pipeline::Split::Test, run_dir,
                     "test");
      write_resolved_config(run_dir, s, corpus_paths(cmd_train));
      std::cout << "trained " << result.history.size() << " epochs (best "
                << result.best_epoch << "), checkpoint at "
                << (run_dir / "model.ckpt").string() << "\n";
      return 0;
    }

    if (cmd_eval.cmd->parsed()) {
      RunSettings s = resolve(cmd_eval.config_path, cmd_eval.apply);
      const auto loaded = pipeline::load_model(eval_model);
      s.train = loaded.config;  // the checkpoint owns the model shape
      if (s.provider.kind == "stub") s.provider.dim = s.train.fusion.d_lang;
      const fs::path run_dir = claim_dir(cmd_eval.run_dir, cmd_eval.force);
      auto handle = make_provider(s.provider);
      const auto corpus =
          load_corpus(cmd_eval.input, cmd_eval.labels, s, handle.get(),
                      nullptr);
      handle.persist();
      const auto split = pipeline::split_from_string(eval_split);
      const auto metrics =
          pipeline::evaluate_split(loaded.model, corpus, split);
      pipeline::write_metrics_csv(metrics, (run_dir / "metrics.csv").string());
      pipeline::write_calibration_csv(
          metrics, (run_dir / "calibration.csv").string());
      write_resolved_config(run_dir, s, corpus_paths(cmd_eval));
      std::cout << eval_split << " accuracy " << metrics.accuracy << " f1 "
                << metrics.f1 << "\n";
      return 0;
    }

    if (cmd_ablate.cmd->parsed()) {
      RunSettings s = resolve(cmd_ablate.config_path, cmd_ablate.apply);
      s.train.validate();
      const fs::path run_dir = claim_dir(cmd_ablate.run_dir, cmd_ablate.force);
      auto handle = make_provider(s.provider);
      const auto corpus = load_corpus(cmd_ablate.input, cmd_ablate.labels, s,
                                      handle.get(), nullptr);
      handle.persist();
      const auto table = pipeline::ablate(corpus, s.train, ablate_seeds);
      write_text(run_dir / "ablation.md", table.to_markdown());
      write_text(run_dir / "ablation.csv", table.to_csv());
      write_resolved_config(run_dir, s, corpus_paths(cmd_ablate));
      std::cout << table.to_markdown();
      return 0;
    }

    if (cmd_explain.cmd->parsed()) {
      RunSettings s = resolve(cmd_explain.config_path, cmd_explain.apply);
      const auto loaded = pipeline::load_model(explain_model);
      s.train = loaded.config;
      if (s.provider.kind == "stub") s.provider.dim = s.train.fusion.d_lang;
      const fs::path run_dir =
          claim_dir(cmd_explain.run_dir, cmd_explain.force);
      auto handle = make_provider(s.provider);
      const auto corpus = load_corpus(cmd_explain.input, cmd_explain.labels,
                                      s, handle.get(), nullptr);
      handle.persist();

      explain::SaliencyOptions opt;
      opt.method = explain::saliency_method_from_string(explain_method);
      opt.k = explain_k;
      opt.steps = explain_steps;
      opt.target_logit = explain_logit;
      const auto split = pipeline::split_from_string(explain_split);

      std::vector<explain::ExplanationReport> reports;
      const fs::path report_dir = run_dir / "reports";
      fs::create_directories(report_dir);
      for (const std::size_t idx : corpus.of_split(split)) {
        const auto& sample = corpus.samples[idx];
        const auto r = explain::report(
            loaded.model, sample, opt,
            explain_offline ? nullptr : handle.provider.get());
        const std::string stem =
            sample.sample_id.substr(0, 12) + "." + sample.method_name;
        write_text(report_dir / (stem + ".json"),
                   explain::report_json(r) + "\n");
        write_text(report_dir / (stem + ".dot"),
                   explain::to_dot_marked(sample.cfg, r.top_nodes));
        reports.push_back(std::move(r));
      }
      explain::write_reports_csv(reports, (run_dir / "reports.csv").string());
      explain::write_gate_distribution_csv(reports,
                                           (run_dir / "gates.csv").string());
      write_resolved_config(run_dir, s, corpus_paths(cmd_explain));
      std::cout << "wrote " << reports.size() << " reports under "
                << report_dir.string() << "\n";
      return 0;
    }

    if (cmd_zeroshot.cmd->parsed()) {
      RunSettings s = resolve(cmd_zeroshot.config_path, cmd_zeroshot.apply);
      const fs::path run_dir =
          claim_dir(cmd_zeroshot.run_dir, cmd_zeroshot.force);
      auto handle = make_provider(s.provider);
      pipeline::IngestConfig icfg;
      icfg.train_fraction = s.ingest.train_fraction;
      icfg.val_fraction = s.ingest.val_fraction;
      icfg.seed = s.ingest.seed;
      const auto manifest =
          pipeline::ingest(cmd_zeroshot.input, cmd_zeroshot.labels, icfg);
      std::size_t correct = 0, abstained = 0;
      std::ostringstream csv;
      csv << "path,label,verdict\n";
      for (const auto& e : manifest.entries) {
        const auto v = semantic::classify_zero_shot(handle.get(), e.source);
        if (v == semantic::Verdict::Abstain) ++abstained;
        const bool hit =
            (v == semantic::Verdict::Vulnerable && e.label == 1) ||
            (v == semantic::Verdict::Safe && e.label == 0);
        if (hit) ++correct;
        csv << e.path << ',' << e.label << ',' << semantic::to_string(v)
            << '\n';
      }
      write_text(run_dir / "zero_shot.csv", csv.str());
      write_resolved_config(run_dir, s, corpus_paths(cmd_zeroshot));
      const double acc = manifest.entries.empty()
                             ? 0.0
                             : static_cast<double>(correct) /
                                   static_cast<double>(manifest.entries.size());
      std::cout << "zero-shot accuracy " << acc << " (" << abstained
                << " abstained) over " << manifest.entries.size()
                << " files\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    log::error("cli", std::string("config: ") + e.what());
    return 2;
  } catch (const ParseError& e) {
    log::error("cli", std::string("parse: ") + e.what());
    return 3;
  } catch (const LabelMissingError& e) {
    log::error("cli", std::string("labels: ") + e.what());
    return 3;
  } catch (const EmptyCorpusError& e) {
    log::error("cli", std::string("corpus: ") + e.what());
    return 3;
  } catch (const MissingEmbeddingError& e) {
    log::error("cli", std::string("embeddings: ") + e.what());
    return 3;
  } catch (const DimensionMismatchError& e) {
    log::error("cli", std::string("dimensions: ") + e.what());
    return 3;
  } catch (const ProviderUnavailableError& e) {
    log::error("cli", std::string("provider: ") + e.what());
    return 4;
  } catch (const Error& e) {
    log::error("cli", e.what());
    return 1;
  }
  return 0;
}
