// Acceptance gate: re-verifies every top-level guarantee end to end and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/log.hpp"
#include "vulngraph/common/rng.hpp"
#include "vulngraph/encoders/encoder.hpp"
#include "vulngraph/encoders/layers.hpp"
#include "vulngraph/explain/explain.hpp"
#include "vulngraph/fusion/fusion.hpp"
#include "vulngraph/graph/matrices.hpp"
#include "vulngraph/javacfg/cfg.hpp"
#include "vulngraph/javacfg/export.hpp"
#include "vulngraph/javacfg/parser.hpp"
#include "vulngraph/objectives/losses.hpp"
#include "vulngraph/pipeline/ablate.hpp"
#include "vulngraph/pipeline/evaluate.hpp"
#include "vulngraph/pipeline/gen_corpus.hpp"
#include "vulngraph/pipeline/train.hpp"
#include "vulngraph/semantic/provider.hpp"
#include "vulngraph/tensor/grad_check.hpp"
#include "vulngraph/tensor/tensor.hpp"

using namespace vulngraph;
using tensor::Tensor;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("vulngraph_gate_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng,
                     bool requires_grad = false) {
  std::vector<double> data(r * c);
  for (auto& x : data) x = uniform_range(-1.0, 1.0, rng);
  return Tensor::from_data({r, c}, std::move(data), requires_grad);
}

void copy_values(const Tensor& src, Tensor& dst) {
  auto out = dst.mutable_data();
  auto in = src.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i];
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- 1

// Random connected-ish graph context at the criterion's small shapes.
encoders::GraphContext small_context(std::size_t n, std::mt19937_64& rng,
                                     std::size_t d_in) {
  std::vector<graph::Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && uniform01(rng) < 0.4) edges.emplace_back(u, v);
  if (n > 1) edges.emplace_back(0, n - 1);
  const auto m = graph::build_matrices(n, edges);
  return encoders::make_graph_context(m, random_tensor(n, d_in, rng));
}

bool criterion_gradients(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t d = 8;  // d' of the criterion
  double worst = 0.0;
  auto note = [&](double e) { worst = std::max(worst, e); };

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 2 + seed % 5;  // |V| <= 6
    const auto ctx = small_context(n, rng, d);

    {
      encoders::GcnLayer layer(d, d, rng);
      Tensor x = random_tensor(n, d, rng, true);
      note(tensor::grad_check(
          [&] { return tensor::sum(layer.forward(ctx, x, true)); },
          {layer.w, layer.b, x}));
    }
    {
      encoders::GatLayer layer(d, d / 2, 2, true, rng);
      Tensor x = random_tensor(n, d, rng, true);
      std::vector<Tensor> wrt = {x};
      for (auto& head : layer.heads) {
        wrt.push_back(head.w);
        wrt.push_back(head.a_src);
        wrt.push_back(head.a_dst);
      }
      note(tensor::grad_check(
          [&] { return tensor::sum(layer.forward(ctx, x, true)); }, wrt));
    }
    {
      encoders::SageLayer layer(d, d, rng);
      Tensor x = random_tensor(n, d, rng, true);
      note(tensor::grad_check(
          [&] { return tensor::sum(layer.forward(ctx, x, true)); },
          {layer.w, layer.b, x}));
    }
    {
      fusion::ProjectionHead head(d, d, fusion::Activation::Gelu, rng);
      Tensor x = random_tensor(3, d, rng, true);
      note(tensor::grad_check(
          [&] { return tensor::sum(head.forward(x)); },
          {head.w, head.b, head.gamma, head.beta, x}));
    }

    for (auto kind : {fusion::FusionKind::Concat, fusion::FusionKind::Gating,
                      fusion::FusionKind::CrossAttention}) {
      fusion::FusionConfig fc;
      fc.kind = kind;
      fc.d_graph = d;
      fc.d_lang = d;
      fc.d_proj = d;
      fc.mlp_hidden = {4};
      fc.seed = seed;
      const fusion::FusionModel model(fc);
      Tensor hg = random_tensor(2, d, rng, true);
      Tensor hl = random_tensor(2, d, rng, true);
      std::vector<Tensor> nodes;
      if (kind == fusion::FusionKind::CrossAttention)
        nodes = {random_tensor(3, d, rng, true),
                 random_tensor(n, d, rng, true)};
      std::vector<Tensor> wrt = {hg, hl};
      for (auto& t : nodes) wrt.push_back(t);
      for (auto& [name, t] : model.params()) wrt.push_back(t);
      note(tensor::grad_check(
          [&] {
            return tensor::sum(
                model.forward(hg, hl, fusion::GateMode::Learned, nodes)
                    .logits);
          },
          wrt));
    }

    {
      Tensor logits = random_tensor(4, 1, rng, true);
      note(tensor::grad_check(
          [&] { return objectives::bce(logits, {1.0, 0.0, 1.0, 0.0}, 1.7); },
          {logits}));
    }
    Tensor g = random_tensor(3, d, rng, true);
    Tensor l = random_tensor(3, d, rng, true);
    note(tensor::grad_check(
        [&] { return objectives::info_nce(g, l, 0.3); }, {g, l}));

    Tensor h = random_tensor(n, d, rng, true);
    std::vector<std::vector<graph::Edge>> lap_edges = {{{0, n - 1}}};
    if (n > 2) lap_edges[0].push_back({1, 2});
    note(tensor::grad_check(
        [&] { return objectives::laplacian_reg({h}, lap_edges); }, {h}));

    {
      Tensor logits = random_tensor(3, 1, rng, true);
      objectives::LossConfig lc;
      lc.lambda_nce = 0.4;
      lc.lambda_lap = 0.2;
      note(tensor::grad_check(
          [&] {
            objectives::LossParts parts;
            parts.cls = objectives::bce(logits, {1.0, 0.0, 1.0});
            parts.nce = objectives::info_nce(g, l, 0.3);
            parts.lap = objectives::laplacian_reg({h}, lap_edges);
            return objectives::total_loss(parts, lc);
          },
          {logits, g, l, h}));
    }
  }

  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max rel err %.2e over 20 seeds, 10 targets (%.1fs)", worst,
                dt);
  detail = buf;
  return worst < 1e-4 && dt < 60.0;
}

// ---------------------------------------------------------------- 2

bool criterion_loss_oracles(std::string& detail) {
  std::mt19937_64 rng(1);
  const double singleton =
      objectives::info_nce(random_tensor(1, 5, rng), random_tensor(1, 5, rng),
                           0.1)
          .value();

  const double uniform =
      objectives::info_nce_from_sims(Tensor::full({4, 4}, 0.37), 0.7).value();

  const Tensor eye = Tensor::from_data({2, 2}, {1.0, 0.0, 0.0, 1.0});
  const double two = objectives::info_nce(eye, eye, 1.0).value();

  const double bce_half = objectives::bce(Tensor::row({0.0}), {1.0}).value();

  const bool ok = singleton == 0.0 &&
                  std::abs(uniform - std::log(4.0)) <= 1e-9 &&
                  std::abs(two - 0.313262) <= 1e-6 &&
                  std::abs(bce_half - std::log(2.0)) <= 1e-12;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "N=1: %g, lnN err %.1e, two-sample err %.1e, bce err %.1e",
                singleton, std::abs(uniform - std::log(4.0)),
                std::abs(two - 0.313262),
                std::abs(bce_half - std::log(2.0)));
  detail = buf;
  return ok;
}

// ---------------------------------------------------------------- 3

bool criterion_laplacian_trace(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 2 + seed % 7;  // up to 8 nodes
    std::vector<graph::Edge> directed;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (uniform01(rng) < 0.35) directed.emplace_back(u, v);

    const Tensor h = random_tensor(n, 4, rng);
    const auto unique = graph::symmetrized_unique_edges(n, directed);
    const double edge_sum =
        objectives::laplacian_reg({h}, {unique}).value();

    const auto m = graph::build_matrices(n, directed);
    double trace = 0.0;
    for (std::size_t dd = 0; dd < 4; ++dd)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double lap_ij = (i == j ? m.sym_degree[i] : 0.0) -
                                m.at(m.sym_adjacency, i, j);
          trace += h.at(i, dd) * lap_ij * h.at(j, dd);
        }
    worst = std::max(worst, std::abs(edge_sum - trace) /
                                std::max(1.0, std::abs(trace)));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max rel diff %.2e over 100 draws", worst);
  detail = buf;
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- 4

bool criterion_gating(std::string& detail) {
  // convexity is exact by construction for any inputs
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    fusion::GatingHead head(6, rng);
    const Tensor g = random_tensor(4, 6, rng);
    const Tensor l = random_tensor(4, 6, rng);
    auto [h, gate] = head.fuse(g, l, fusion::GateMode::Learned);
    for (std::size_t r = 0; r < 4; ++r)
      if (gate.at(r, 0) + gate.at(r, 1) != 1.0) {
        detail = "gate row does not sum to exactly 1";
        return false;
      }
  }

  // symmetric weights + equal inputs -> (0.5, 0.5)
  std::mt19937_64 rng(3);
  fusion::GatingHead head(4, rng);
  copy_values(head.w_e, head.w_e2);
  copy_values(head.b_e, head.b_e2);
  const Tensor g = Tensor::row({0.4, -0.2, 0.9, 0.1});
  auto [h, gate] = head.fuse(g, g, fusion::GateMode::Learned);
  const double sym_err = std::max(std::abs(gate.at(0, 0) - 0.5),
                                  std::abs(gate.at(0, 1) - 0.5));

  // adding one constant to both scores leaves the gate unchanged
  fusion::GatingHead head2(4, rng);
  const Tensor g2 = random_tensor(1, 4, rng);
  const Tensor l2 = random_tensor(1, 4, rng);
  const Tensor scores = head2.scores(g2, l2);
  const Tensor shifted =
      tensor::add(scores, Tensor::full(scores.shape(), 37.5));
  const Tensor a1 = tensor::softmax_pair(scores);
  const Tensor a2 = tensor::softmax_pair(shifted);
  double shift_err = 0.0;
  for (std::size_t j = 0; j < 2; ++j)
    shift_err = std::max(shift_err, std::abs(a1.at(0, j) - a2.at(0, j)));

  char buf[120];
  std::snprintf(buf, sizeof buf,
                "sum exact, symmetric err %.1e, shift err %.1e", sym_err,
                shift_err);
  detail = buf;
  return sym_err <= 1e-12 && shift_err <= 1e-12;
}

// ---------------------------------------------------------------- 5

struct GoldenCfg {
  const char* source;
  std::vector<std::pair<javacfg::NodeKind, const char*>> nodes;
  std::vector<javacfg::Edge> edges;
};

// Hand-traced expectations; entry is always node 0 and exit is last.
const std::vector<GoldenCfg>& golden_suite() {
  using javacfg::NodeKind;
  static const std::vector<GoldenCfg> cases = {
      {"class A { void f() {} }",
       {{NodeKind::Entry, "entry"}, {NodeKind::Exit, "exit"}},
       {{0, 1}}},
      {"class A { int f() { return 1; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Return, "return 1;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}}},
      // if/else diamond joining before the return
      {"class A { int f(int x) { if (x > 0) { x = 1; } else { x = 2; } "
       "return x; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Branch, "if (x > 0)"},
        {NodeKind::Statement, "x = 1;"},
        {NodeKind::Statement, "x = 2;"},
        {NodeKind::Return, "return x;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}, {4, 5}}},
      {"class A { void f(int x) { if (x > 0) { x = 1; } x = 2; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Branch, "if (x > 0)"},
        {NodeKind::Statement, "x = 1;"},
        {NodeKind::Statement, "x = 2;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 3}, {2, 3}, {3, 4}}},
      // empty arm: out-degree falls to 1, node demotes to a statement
      {"class A { void f(int x) { if (x > 0) { } x = 1; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Statement, "if (x > 0)"},
        {NodeKind::Statement, "x = 1;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {2, 3}}},
      // loop back-edge plus the header's exit edge
      {"class A { void f(int n) { int i = 0; while (i < n) { i = i + 1; } } "
       "}",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Statement, "int i = 0;"},
        {NodeKind::Loop, "while (i < n)"},
        {NodeKind::Statement, "i = i + 1;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {3, 2}}},
      {"class A { void f(int n) { do { n = n - 1; } while (n > 0); } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Statement, "n = n - 1;"},
        {NodeKind::Loop, "do-while (n > 0)"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {2, 1}, {2, 3}}},
      {"class A { void f(int n) { for (int i = 0; i < n; i++) { "
       "if (i % 2 == 0) { continue; } n = n + i; } } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Loop, "for (int i = 0; i < n; i++)"},
        {NodeKind::Branch, "if (i % 2 == 0)"},
        {NodeKind::Statement, "continue;"},
        {NodeKind::Statement, "n = n + i;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 5}, {2, 3}, {2, 4}, {3, 1}, {4, 1}}},
      {"class A { void f(int n) { while (true) { if (n == 0) { break; } "
       "n = n - 1; } } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Loop, "while (true)"},
        {NodeKind::Branch, "if (n == 0)"},
        {NodeKind::Statement, "break;"},
        {NodeKind::Statement, "n = n - 1;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 5}, {2, 3}, {2, 4}, {3, 5}, {4, 1}}},
      {"class A { void f(int x) { switch (x) { case 1: x = 10; case 2: "
       "x = 20; break; default: x = 30; } x = 40; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Switch, "switch (x)"},
        {NodeKind::Statement, "x = 10;"},
        {NodeKind::Statement, "x = 20;"},
        {NodeKind::Statement, "break;"},
        {NodeKind::Statement, "x = 30;"},
        {NodeKind::Statement, "x = 40;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1},
        {1, 2},
        {1, 3},
        {1, 5},
        {2, 3},
        {3, 4},
        {4, 6},
        {5, 6},
        {6, 7}}},
      {"class A { void f(int x) { switch (x) { case 1: x = 1; break; } "
       "x = 2; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Switch, "switch (x)"},
        {NodeKind::Statement, "x = 1;"},
        {NodeKind::Statement, "break;"},
        {NodeKind::Statement, "x = 2;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 4}, {2, 3}, {3, 4}, {4, 5}}},
      {"class A { void f() { try { foo(); } catch (Exception e) { bar(); } "
       "finally { baz(); } } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Try, "try"},
        {NodeKind::Statement, "foo();"},
        {NodeKind::Catch, "catch (Exception e)"},
        {NodeKind::Statement, "bar();"},
        {NodeKind::Statement, "baz();"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 3}, {2, 5}, {3, 4}, {4, 5}, {5, 6}}},
      {"class A { void f() { try (Reader r = open()) { use(r); } "
       "catch (IOException e) { log(e); } } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Try, "try (Reader r = open())"},
        {NodeKind::Statement, "use(r);"},
        {NodeKind::Catch, "catch (IOException e)"},
        {NodeKind::Statement, "log(e);"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 3}, {2, 5}, {3, 4}, {4, 5}}},
      // throw leaves straight for the exit
      {"class A { void f(int x) { if (x < 0) { "
       "throw new IllegalArgumentException(\"x\"); } x = 1; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Branch, "if (x < 0)"},
        {NodeKind::Return, "throw new IllegalArgumentException(\"x\");"},
        {NodeKind::Statement, "x = 1;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}}},
      // unreachable code after the return is pruned
      {"class A { int f() { return 1; int x = 2; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Return, "return 1;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}}},
      {"class A { void f(int n) { outer: for (int i = 0; i < n; i++) { "
       "for (int j = 0; j < n; j++) { if (i == j) { break outer; } } } } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Loop, "for (int i = 0; i < n; i++)"},
        {NodeKind::Loop, "for (int j = 0; j < n; j++)"},
        {NodeKind::Branch, "if (i == j)"},
        {NodeKind::Statement, "break outer;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 5}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 5}}},
      {"class A { int f(int[] a) { int s = 0; for (int x : a) { s += x; } "
       "return s; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Statement, "int s = 0;"},
        {NodeKind::Loop, "for (int x : a)"},
        {NodeKind::Statement, "s += x;"},
        {NodeKind::Return, "return s;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {3, 2}, {4, 5}}},
      // early return from one arm
      {"class A { int f(int x) { if (x > 0) { return 1; } return 2; } }",
       {{NodeKind::Entry, "entry"},
        {NodeKind::Branch, "if (x > 0)"},
        {NodeKind::Return, "return 1;"},
        {NodeKind::Return, "return 2;"},
        {NodeKind::Exit, "exit"}},
       {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}}},
  };
  return cases;
}

bool criterion_cfg_golden(std::string& detail) {
  const auto& suite = golden_suite();
  std::size_t failed = 0;
  for (const auto& gc : suite) {
    auto build = [&] {
      auto methods = javacfg::parse_java(gc.source);
      if (methods.size() != 1)
        throw Error("expected one method in golden snippet");
      return javacfg::build_cfg(methods[0]);
    };
    const auto cfg = build();
    bool ok = cfg.nodes.size() == gc.nodes.size() && cfg.edges == gc.edges;
    if (ok)
      for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
        if (cfg.nodes[i].kind != gc.nodes[i].first ||
            cfg.nodes[i].label != gc.nodes[i].second)
          ok = false;
    // determinism: a second pass must reproduce the DOT byte for byte
    if (ok && javacfg::to_dot(cfg) != javacfg::to_dot(build())) ok = false;
    if (!ok) {
      ++failed;
      std::fprintf(stderr, "  golden mismatch: %s\n", gc.source);
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%zu snippets exact, deterministic (%zu bad)",
                suite.size(), failed);
  detail = buf;
  return failed == 0 && suite.size() >= 15;
}

// ------------------------------------------------------------ 6 - 9

// Shared desk-scale corpus: generated once, prepared once, reused by
// the ablation, fusion, explanation and reproducibility criteria.
struct DeskContext {
  TempDir dir;
  pipeline::TrainConfig config;
  pipeline::PreparedCorpus corpus;
  pipeline::AblationTable table;
  bool corpus_ready = false;
  bool table_ready = false;
  double gating_mean = 0.0;  // the ablation's full-model row
};

pipeline::TrainConfig desk_config() {
  pipeline::TrainConfig cfg;
  cfg.epochs = 12;
  cfg.batch_size = 32;
  cfg.lr = 5e-3;
  cfg.patience = 0;
  cfg.encoder.d_in = 64;
  cfg.encoder.hidden = 32;
  cfg.encoder.d_out = 32;
  cfg.fusion.d_lang = 16;
  cfg.fusion.d_proj = 32;
  cfg.fusion.mlp_hidden = {16};
  cfg.loss.lambda_nce = 0.02;
  cfg.loss.lambda_lap = 0.005;
  return cfg;
}

void build_desk_corpus(DeskContext& ctx) {
  ctx.config = desk_config();
  const fs::path root = ctx.dir.path / "corpus";
  pipeline::generate_corpus(root.string(), {400, 7});
  const auto manifest =
      pipeline::ingest(root.string(), (root / "labels.csv").string(), {});
  std::size_t pos = 0;
  for (const auto& e : manifest.entries) pos += e.label;
  if (manifest.entries.size() < 400 || pos * 2 != manifest.entries.size())
    throw Error("generated corpus is not 400+ balanced files");
  const encoders::GraphEncoder enc(ctx.config.encoder);
  semantic::StubProvider provider(ctx.config.fusion.d_lang);
  ctx.corpus = pipeline::prepare_corpus(manifest, enc, provider);
  ctx.corpus_ready = true;
}

double row_mean(const pipeline::AblationTable& table,
                const std::string& variant) {
  for (const auto& row : table.rows)
    if (row.variant == variant) return row.mean_accuracy;
  throw Error("missing ablation row: " + variant);
}

bool criterion_ablation(DeskContext& ctx, std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  build_desk_corpus(ctx);
  ctx.table = pipeline::ablate(ctx.corpus, ctx.config, {0, 1, 2});
  ctx.table_ready = true;

  const double full = row_mean(ctx.table, "Full (Graph + Semantics + Losses)");
  const double no_graphs = row_mean(ctx.table, "No Graphs");
  const double no_sem = row_mean(ctx.table, "No Semantics");
  const double no_nce = row_mean(ctx.table, "No InfoNCE");
  const double no_lap = row_mean(ctx.table, "No Laplacian");
  ctx.gating_mean = full;

  const double tol = 0.01;  // one accuracy point
  const bool ordering = full >= no_nce - tol && full >= no_lap - tol &&
                        full >= std::max(no_graphs, no_sem) - tol;
  // the directional claim: dropping the graph branch hurts most
  const bool graphs_cost_most = no_graphs <= no_sem && no_graphs <= no_nce &&
                                no_graphs <= no_lap;
  const double dt = seconds_since(t0);

  char buf[240];
  std::snprintf(buf, sizeof buf,
                "full %.1f%%, no-graphs %.1f%%, no-sem %.1f%%, no-nce %.1f%%, "
                "no-lap %.1f%% over 3 seeds (%.0fs)",
                100 * full, 100 * no_graphs, 100 * no_sem, 100 * no_nce,
                100 * no_lap, dt);
  detail = buf;
  return ordering && graphs_cost_most && dt < 900.0;
}

bool criterion_fusion_superiority(DeskContext& ctx, std::string& detail) {
  if (!ctx.corpus_ready || !ctx.table_ready) {
    detail = "desk corpus unavailable";
    return false;
  }
  double concat_sum = 0.0;
  for (std::uint64_t seed : {0, 1, 2}) {
    auto cfg = ctx.config;
    cfg.seed = seed;
    cfg.fusion.kind = fusion::FusionKind::Concat;
    const auto result = pipeline::train(ctx.corpus, cfg);
    concat_sum +=
        pipeline::evaluate_split(result.model, ctx.corpus, pipeline::Split::Val)
            .accuracy;
  }
  const double concat_mean = concat_sum / 3.0;
  char buf[120];
  std::snprintf(buf, sizeof buf, "gating %.2f%% vs concat %.2f%% over 3 seeds",
                100 * ctx.gating_mean, 100 * concat_mean);
  detail = buf;
  return ctx.gating_mean >= concat_mean - 0.01;
}

struct EchoProvider : semantic::SemanticProvider {
  std::string reply;
  explicit EchoProvider(std::string r) : reply(std::move(r)) {}
  std::vector<double> embed(const std::string&) override { return {0.0}; }
  std::string generate(const std::string&, std::size_t, double) override {
    return reply;
  }
  std::string name() const override { return "echo"; }
};

bool criterion_explanations(DeskContext& ctx, std::string& detail) {
  if (!ctx.corpus_ready) {
    detail = "desk corpus unavailable";
    return false;
  }
  auto cfg = ctx.config;
  cfg.seed = 0;
  const auto trained = pipeline::train(ctx.corpus, cfg);

  // completeness on every test sample at the default 128 steps
  double worst_gap = 0.0;
  const auto test_idx = ctx.corpus.of_split(pipeline::Split::Test);
  for (std::size_t idx : test_idx) {
    const auto result =
        explain::saliency(trained.model, ctx.corpus.samples[idx], {});
    worst_gap = std::max(worst_gap, result.completeness_gap);
  }

  const std::string prompt =
      explain::build_prompt("int f() { return 1; }", 1, {"a", "b c"});
  const bool prompt_ok =
      prompt ==
      "One sentence: main reason this code is vulnerable. Provide only one "
      "sentence.\nCode: int f() { return 1; }\nTop nodes: a, b c\n"
      "One-sentence explanation:";
  const bool safe_ok = explain::build_prompt("x", 0, {}).find(
                           "main reason this code is safe") !=
                       std::string::npos;

  // k clamps to |V|
  const auto& sample0 = ctx.corpus.samples[test_idx.front()];
  explain::SaliencyOptions wide;
  wide.k = 1000;
  const auto clamped = explain::saliency(trained.model, sample0, wide);
  const bool clamp_ok = clamped.top_nodes.size() == sample0.cfg.nodes.size();

  EchoProvider chatty("The query concatenates user input. It also logs.");
  const auto j = explain::justify("p", &chatty, "fb");
  const bool truncate_ok =
      j.sentence == "The query concatenates user input." && !j.fallback;

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "max completeness gap %.2e over %zu test samples; prompt, "
                "clamp, truncation %s",
                worst_gap, test_idx.size(),
                prompt_ok && safe_ok && clamp_ok && truncate_ok ? "ok" : "BAD");
  detail = buf;
  return worst_gap <= 1e-3 && prompt_ok && safe_ok && clamp_ok && truncate_ok;
}

bool criterion_reproducibility(DeskContext& ctx, std::string& detail) {
  if (!ctx.corpus_ready) {
    detail = "desk corpus unavailable";
    return false;
  }
  auto cfg = ctx.config;
  cfg.seed = 5;
  cfg.epochs = 6;

  std::vector<fs::path> ckpts, metrics;
  for (int run = 0; run < 2; ++run) {
    const auto result = pipeline::train(ctx.corpus, cfg);
    const auto m =
        pipeline::evaluate_split(result.model, ctx.corpus, pipeline::Split::Val);
    const fs::path ckpt =
        ctx.dir.path / ("repro_" + std::to_string(run) + ".ckpt");
    const fs::path csv =
        ctx.dir.path / ("repro_" + std::to_string(run) + ".csv");
    pipeline::save_model(ckpt.string(), result.model, cfg);
    pipeline::write_metrics_csv(m, csv.string());
    ckpts.push_back(ckpt);
    metrics.push_back(csv);
  }
  const bool ckpt_same = read_bytes(ckpts[0]) == read_bytes(ckpts[1]);
  const bool metrics_same = read_bytes(metrics[0]) == read_bytes(metrics[1]);
  detail = std::string("checkpoint ") + (ckpt_same ? "identical" : "DIFFERS") +
           ", metrics " + (metrics_same ? "identical" : "DIFFER");
  return ckpt_same && metrics_same && !read_bytes(ckpts[0]).empty();
}

}  // namespace

int main() {
  log::set_level(log::Level::error);
  int failures = 0;
  auto run = [&](int idx, const char* name, auto&& fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    std::fflush(stdout);
  };

  DeskContext ctx;
  run(1, "gradient correctness", [](std::string& d) {
    return criterion_gradients(d);
  });
  run(2, "closed-form loss oracles", [](std::string& d) {
    return criterion_loss_oracles(d);
  });
  run(3, "laplacian trace equivalence", [](std::string& d) {
    return criterion_laplacian_trace(d);
  });
  run(4, "gating invariants", [](std::string& d) {
    return criterion_gating(d);
  });
  run(5, "cfg golden suite", [](std::string& d) {
    return criterion_cfg_golden(d);
  });
  run(6, "desk-scale ablation ordering", [&](std::string& d) {
    return criterion_ablation(ctx, d);
  });
  run(7, "gating vs concat fusion", [&](std::string& d) {
    return criterion_fusion_superiority(ctx, d);
  });
  run(8, "explanation integrity", [&](std::string& d) {
    return criterion_explanations(ctx, d);
  });
  run(9, "seeded reproducibility", [&](std::string& d) {
    return criterion_reproducibility(ctx, d);
  });

  std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
