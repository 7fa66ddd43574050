#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/rng.hpp"
#include "vulngraph/fusion/checkpoint.hpp"
#include "vulngraph/fusion/fusion.hpp"
#include "vulngraph/tensor/grad_check.hpp"
#include "vulngraph/tensor/tensor.hpp"

using namespace vulngraph;
using namespace vulngraph::fusion;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng,
                     bool requires_grad = false) {
  std::vector<double> data(r * c);
  for (auto& x : data) x = uniform_range(-1.0, 1.0, rng);
  return Tensor::from_data({r, c}, std::move(data), requires_grad);
}

void fill(Tensor& t, double value) {
  for (auto& x : t.mutable_data()) x = value;
}

void copy_values(const Tensor& src, Tensor& dst) {
  auto out = dst.mutable_data();
  auto in = src.data();
  REQUIRE(in.size() == out.size());
  std::copy(in.begin(), in.end(), out.begin());
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.shape() == b.shape());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

// forward oracle for one projection head, plain loops
std::vector<double> project_oracle(const std::vector<double>& x,
                                   const ProjectionHead& head) {
  const std::size_t d_in = x.size();
  const std::size_t d_out = head.w.cols();
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<double> xn(d_in);
  for (std::size_t i = 0; i < d_in; ++i) xn[i] = x[i] / (norm + 1e-8);

  std::vector<double> lin(d_out, 0.0);
  for (std::size_t j = 0; j < d_out; ++j) {
    for (std::size_t i = 0; i < d_in; ++i)
      lin[j] += xn[i] * head.w.at(i, j);
    lin[j] += head.b.at(0, j);
  }
  for (auto& v : lin) {
    const double u = 0.7978845608028654 * (v + 0.044715 * v * v * v);
    v = 0.5 * v * (1.0 + std::tanh(u));
  }
  double mean = 0.0;
  for (double v : lin) mean += v;
  mean /= static_cast<double>(d_out);
  double var = 0.0;
  for (double v : lin) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d_out);
  const double inv = 1.0 / std::sqrt(var + 1e-5);
  std::vector<double> out(d_out);
  for (std::size_t j = 0; j < d_out; ++j)
    out[j] = head.gamma.at(0, j) * (lin[j] - mean) * inv + head.beta.at(0, j);
  return out;
}

FusionConfig small_config(FusionKind kind) {
  FusionConfig cfg;
  cfg.kind = kind;
  cfg.d_graph = 5;
  cfg.d_lang = 7;
  cfg.d_proj = 4;
  cfg.mlp_hidden = {3};
  cfg.seed = 11;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("projection with zero weights yields the layer-norm bias") {
  std::mt19937_64 rng(1);
  ProjectionHead head(3, 4, Activation::Gelu, rng);
  fill(head.w, 0.0);
  fill(head.b, 0.0);
  head.beta = Tensor::row({1.0, 2.0, 3.0, 4.0}, true);
  const Tensor out = head.forward(Tensor::row({0.3, -0.7, 0.9}));
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(out.at(0, j) == static_cast<double>(j + 1));
}

TEST_CASE("projection is pure and matches a hand-rolled oracle") {
  std::mt19937_64 rng(2);
  ProjectionHead head(6, 5, Activation::Gelu, rng);
  const std::vector<double> x = {0.5, -1.2, 0.3, 2.0, -0.4, 0.8};
  const Tensor a = head.forward(Tensor::row(x));
  const Tensor b = head.forward(Tensor::row(x));
  CHECK(max_abs_diff(a, b) == 0.0);

  const auto oracle = project_oracle(x, head);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(a.at(0, j) == doctest::Approx(oracle[j]).epsilon(1e-9));
}

TEST_CASE("fuse_concat is graph-first with norm additivity") {
  const Tensor g = Tensor::row({1.0, 0.0});
  const Tensor l = Tensor::row({1.0, 0.0});
  const Tensor u = fuse_concat(g, l);
  REQUIRE(u.shape() == Tensor::Shape{1, 4});
  CHECK(u.at(0, 0) == 1.0);
  CHECK(u.at(0, 1) == 0.0);
  CHECK(u.at(0, 2) == 1.0);
  CHECK(u.at(0, 3) == 0.0);

  const Tensor g2 = Tensor::row({3.0, 4.0});
  const Tensor l2 = Tensor::row({1.0, 2.0});
  const Tensor u2 = fuse_concat(g2, l2);
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < 4; ++j) norm_sq += u2.at(0, j) * u2.at(0, j);
  CHECK(norm_sq == doctest::Approx(25.0 + 5.0));
  CHECK(u2.at(0, 0) == 3.0);  // graph half first
  CHECK(u2.at(0, 2) == 1.0);
}

TEST_CASE("gate is exactly balanced under full symmetry") {
  std::mt19937_64 rng(3);
  GatingHead head(4, rng);
  copy_values(head.w_e, head.w_e2);
  copy_values(head.b_e, head.b_e2);
  const Tensor g = Tensor::row({0.4, -0.2, 0.9, 0.1});
  auto [h, gate] = head.fuse(g, g, GateMode::Learned);
  CHECK(gate.at(0, 0) == 0.5);
  CHECK(gate.at(0, 1) == 0.5);
  CHECK(max_abs_diff(h, g) <= 1e-15);
}

TEST_CASE("gate weights follow the softmax closed form") {
  // engineer e_g - e_l = ln 3: zero both score matrices, v = 2,
  // b_e = atanh(ln3 / 2) in one coordinate, b_e' = 0
  std::mt19937_64 rng(4);
  GatingHead head(1, rng);
  fill(head.w_e, 0.0);
  fill(head.w_e2, 0.0);
  fill(head.b_e2, 0.0);
  head.v = Tensor::row({2.0}, true);
  head.b_e = Tensor::row({std::atanh(std::log(3.0) / 2.0)}, true);

  const Tensor g = Tensor::row({5.0});
  const Tensor l = Tensor::row({-2.0});
  auto [h, gate] = head.fuse(g, l, GateMode::Learned);
  CHECK(gate.at(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(gate.at(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(h.at(0, 0) == doctest::Approx(0.75 * 5.0 + 0.25 * -2.0).epsilon(1e-12));
}

TEST_CASE("gate weights sum to one and respond continuously near 1") {
  std::mt19937_64 rng(5);
  GatingHead head(3, rng);
  const Tensor g = Tensor::row({0.3, 0.8, -0.5});
  const Tensor l = Tensor::row({-0.9, 0.2, 0.6});
  auto [h, gate] = head.fuse(g, l, GateMode::Learned);
  CHECK(gate.at(0, 0) + gate.at(0, 1) == 1.0);  // exact by construction
  CHECK(gate.at(0, 0) > 0.0);
  CHECK(gate.at(0, 1) > 0.0);

  // push a_g to 1 - ~1e-6 and check h approaches g
  GatingHead sharp(1, rng);
  fill(sharp.w_e, 0.0);
  fill(sharp.w_e2, 0.0);
  fill(sharp.b_e2, 0.0);
  sharp.v = Tensor::row({20.0}, true);
  sharp.b_e = Tensor::row({std::atanh(std::log(1e6) / 20.0)}, true);
  const Tensor g1 = Tensor::row({1.0});
  const Tensor l1 = Tensor::row({-1.0});
  auto [h1, gate1] = sharp.fuse(g1, l1, GateMode::Learned);
  CHECK(gate1.at(0, 0) == doctest::Approx(1.0 - 1e-6).epsilon(1e-9));
  CHECK(std::abs(h1.at(0, 0) - 1.0) < 1e-5);
}

TEST_CASE("gate weights are invariant to a shared score shift") {
  std::mt19937_64 rng(6);
  GatingHead head(4, rng);
  const Tensor g = Tensor::row({0.1, 0.7, -0.3, 0.5});
  const Tensor l = Tensor::row({0.9, -0.6, 0.2, -0.1});
  const Tensor scores = head.scores(g, l);
  const Tensor shifted = add(scores, Tensor::full(scores.shape(), 37.5));
  const Tensor a1 = softmax_pair(scores);
  const Tensor a2 = softmax_pair(shifted);
  CHECK(max_abs_diff(a1, a2) <= 1e-12);
}

TEST_CASE("pinned gates reproduce single-modality pathways bit for bit") {
  auto cfg = small_config(FusionKind::Gating);
  FusionModel model(cfg);
  std::mt19937_64 rng(7);
  const Tensor h_g = random_tensor(3, cfg.d_graph, rng);
  const Tensor h_l = random_tensor(3, cfg.d_lang, rng);

  auto graph_only = model.forward(h_g, h_l, GateMode::GraphOnly);
  auto [g_hat, l_hat] = model.project(h_g, h_l);
  const Tensor direct = model.classifier().logits(g_hat);
  CHECK(max_abs_diff(graph_only.logits, direct) == 0.0);
  CHECK(graph_only.gate.at(0, 0) == 1.0);
  CHECK(graph_only.gate.at(2, 1) == 0.0);

  auto lang_only = model.forward(h_g, h_l, GateMode::SemanticsOnly);
  const Tensor direct_l = model.classifier().logits(l_hat);
  CHECK(max_abs_diff(lang_only.logits, direct_l) == 0.0);
}

TEST_CASE("cross-attention degenerates correctly") {
  std::mt19937_64 rng(8);
  CrossAttentionHead head(3, 3, rng);
  const Tensor query = Tensor::row({0.2, -0.5, 0.8});

  SUBCASE("single key: output equals its value row") {
    const Tensor keys = random_tensor(1, 3, rng);
    const Tensor f = head.attend(query, keys);
    const Tensor v = matmul(keys, head.w_v);
    CHECK(max_abs_diff(f, v) == 0.0);
  }

  SUBCASE("zero key matrix: uniform attention averages the values") {
    fill(head.w_k, 0.0);
    const Tensor keys = random_tensor(3, 3, rng);
    const Tensor f = head.attend(query, keys);
    const Tensor mean_v = mean_rows(matmul(keys, head.w_v));
    CHECK(max_abs_diff(f, mean_v) <= 1e-12);
  }

  SUBCASE("three keys match a hand oracle") {
    const Tensor keys = random_tensor(3, 3, rng);
    const Tensor f = head.attend(query, keys);

    auto matvec = [&](const Tensor& w, const double* x, double* out) {
      for (std::size_t j = 0; j < 3; ++j) {
        out[j] = 0.0;
        for (std::size_t i = 0; i < 3; ++i) out[j] += x[i] * w.at(i, j);
      }
    };
    double q[3];
    matvec(head.w_q, query.data().data(), q);
    double k[3][3], v[3][3];
    for (std::size_t r = 0; r < 3; ++r) {
      matvec(head.w_k, keys.data().data() + 3 * r, k[r]);
      matvec(head.w_v, keys.data().data() + 3 * r, v[r]);
    }
    double logits[3];
    for (std::size_t r = 0; r < 3; ++r) {
      logits[r] = (q[0] * k[r][0] + q[1] * k[r][1] + q[2] * k[r][2]) /
                  std::sqrt(3.0);
    }
    const double m = std::max({logits[0], logits[1], logits[2]});
    double alpha[3], z = 0.0;
    for (std::size_t r = 0; r < 3; ++r) z += alpha[r] = std::exp(logits[r] - m);
    for (std::size_t r = 0; r < 3; ++r) alpha[r] /= z;
    for (std::size_t j = 0; j < 3; ++j) {
      const double expect =
          alpha[0] * v[0][j] + alpha[1] * v[1][j] + alpha[2] * v[2][j];
      CHECK(f.at(0, j) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("classifier degenerate weights behave like the sigmoid") {
  auto cfg = small_config(FusionKind::Concat);
  cfg.mlp_hidden = {};  // pure linear
  FusionModel model(cfg);
  for (auto& [name, t] : model.params()) {
    if (name.rfind("clf.", 0) == 0) fill(t, 0.0);
  }
  std::mt19937_64 rng(9);
  const Tensor h_g = random_tensor(2, cfg.d_graph, rng);
  const Tensor h_l = random_tensor(2, cfg.d_lang, rng);
  auto out = model.forward(h_g, h_l);
  CHECK(out.logits.at(0, 0) == 0.0);
  CHECK(out.prob.at(0, 0) == 0.5);
  CHECK(out.prob.at(1, 0) == 0.5);

  // W_c = 0, b_c = 0.3: every input maps to sigmoid(0.3)
  model.classifier().layers.back().second = Tensor::row({0.3}, true);
  auto out2 = model.forward(h_g, h_l);
  const double expect = 1.0 / (1.0 + std::exp(-0.3));
  CHECK(out2.prob.at(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(out2.prob.at(1, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("classifier input follows the fusion kind") {
  const std::size_t d = small_config(FusionKind::Concat).d_proj;

  FusionModel concat(small_config(FusionKind::Concat));
  FusionModel gating(small_config(FusionKind::Gating));
  auto residual_cfg = small_config(FusionKind::CrossAttention);
  residual_cfg.combine = CombineMode::Residual;
  FusionModel residual(residual_cfg);
  auto replace_cfg = small_config(FusionKind::CrossAttention);
  replace_cfg.combine = CombineMode::Replace;
  FusionModel replace(replace_cfg);

  std::mt19937_64 rng(10);
  const Tensor h_g = random_tensor(2, 5, rng);
  const Tensor h_l = random_tensor(2, 7, rng);
  const std::vector<Tensor> nodes = {random_tensor(3, 5, rng),
                                     random_tensor(4, 5, rng)};

  CHECK(concat.forward(h_g, h_l).fused.cols() == 2 * d);
  CHECK(gating.forward(h_g, h_l).fused.cols() == d);
  CHECK(residual.forward(h_g, h_l, GateMode::Learned, nodes).fused.cols() ==
        2 * d);
  CHECK(replace.forward(h_g, h_l, GateMode::Learned, nodes).fused.cols() == d);

  // forcing the concatenated head overrides the per-kind input
  auto forced_cfg = small_config(FusionKind::Gating);
  forced_cfg.force_concat_classifier = true;
  FusionModel forced(forced_cfg);
  auto out = forced.forward(h_g, h_l);
  auto [g_hat, l_hat] = forced.project(h_g, h_l);
  CHECK(out.fused.cols() == 2 * d);
  CHECK(max_abs_diff(out.fused, fuse_concat(g_hat, l_hat)) == 0.0);

  CHECK_THROWS_AS(replace.forward(h_g, h_l), ConfigError);  // nodes required
  CHECK_THROWS_AS(concat.forward(random_tensor(2, 4, rng), h_l),
                  ShapeMismatchError);
  CHECK_THROWS_AS(concat.forward(h_g, random_tensor(2, 6, rng)),
                  ShapeMismatchError);
  FusionModel no_gate(small_config(FusionKind::Concat));
  CHECK_THROWS_AS(no_gate.gating(), ConfigError);
  CHECK_THROWS_AS(no_gate.cross_attention(), ConfigError);
}

TEST_CASE("full fusion passes grad_check for every kind") {
  const std::vector<double> labels = {1.0, 0.0, 1.0};
  for (auto kind : {FusionKind::Concat, FusionKind::Gating,
                    FusionKind::CrossAttention}) {
    CAPTURE(to_string(kind));
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto cfg = small_config(kind);
      cfg.seed = seed + 100;
      FusionModel model(cfg);
      std::mt19937_64 rng(seed);
      const Tensor h_g = random_tensor(3, cfg.d_graph, rng, true);
      const Tensor h_l = random_tensor(3, cfg.d_lang, rng, true);
      const std::vector<Tensor> nodes = {random_tensor(2, 5, rng, true),
                                         random_tensor(4, 5, rng, true),
                                         random_tensor(3, 5, rng, true)};

      std::vector<Tensor> wrt = {h_g, h_l};
      if (kind == FusionKind::CrossAttention) {
        wrt.insert(wrt.end(), nodes.begin(), nodes.end());
      }
      for (auto& [name, t] : model.params()) wrt.push_back(t);

      auto loss = [&] {
        auto out = model.forward(h_g, h_l, GateMode::Learned, nodes);
        return bce_with_logits(out.logits, labels);
      };
      CHECK(grad_check(loss, wrt) < 1e-4);
    }
  }
}

TEST_CASE("parameter names are stable and ordered") {
  FusionModel model(small_config(FusionKind::Gating));
  std::vector<std::string> names;
  for (auto& [name, t] : model.params()) names.push_back(name);
  const std::vector<std::string> expected = {
      "proj.g.w",  "proj.g.b",  "proj.g.gamma", "proj.g.beta",
      "proj.l.w",  "proj.l.b",  "proj.l.gamma", "proj.l.beta",
      "gate.w_e",  "gate.b_e",  "gate.w_e2",    "gate.b_e2",
      "gate.v",    "clf.0.w",   "clf.0.b",      "clf.out.w",
      "clf.out.b"};
  CHECK(names == expected);

  FusionModel cross(small_config(FusionKind::CrossAttention));
  names.clear();
  for (auto& [name, t] : cross.params()) names.push_back(name);
  CHECK(std::find(names.begin(), names.end(), "cross.w_q") != names.end());
  CHECK(std::find(names.begin(), names.end(), "gate.v") == names.end());
}

TEST_CASE("fusion kind and mode strings round-trip") {
  for (auto k : {FusionKind::Concat, FusionKind::Gating,
                 FusionKind::CrossAttention}) {
    CHECK(fusion_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(fusion_kind_from_string("mystery"), ConfigError);
  CHECK(activation_from_string("relu") == Activation::Relu);
  CHECK_THROWS_AS(activation_from_string("swish"), ConfigError);
  CHECK(combine_mode_from_string("replace") == CombineMode::Replace);
  CHECK_THROWS_AS(combine_mode_from_string("sum"), ConfigError);
}

TEST_CASE("checkpoints round-trip and are byte deterministic") {
  const std::string path = temp_path("vg_ckpt_roundtrip.bin");
  FusionModel model(small_config(FusionKind::Gating));
  const std::string meta = R"({"fusion":"gating","seed":11})";

  save_checkpoint(path, meta, model.params());
  auto first = [&] {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  }();
  save_checkpoint(path, meta, model.params());
  auto second = [&] {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  }();
  CHECK(first == second);
  CHECK(first.substr(0, 6) == "VGCKPT");

  auto ckpt = load_checkpoint(path);
  CHECK(ckpt.meta == meta);
  REQUIRE(ckpt.params.size() == model.params().size());
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    CHECK(ckpt.params[i].first == model.params()[i].first);
    CHECK(max_abs_diff(ckpt.params[i].second, model.params()[i].second) == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("loading a checkpoint restores the forward pass exactly") {
  const std::string path = temp_path("vg_ckpt_restore.bin");
  auto cfg = small_config(FusionKind::Gating);
  FusionModel saved(cfg);
  cfg.seed = 999;
  FusionModel restored(cfg);

  std::mt19937_64 rng(12);
  const Tensor h_g = random_tensor(2, cfg.d_graph, rng);
  const Tensor h_l = random_tensor(2, cfg.d_lang, rng);
  REQUIRE(max_abs_diff(saved.forward(h_g, h_l).logits,
                       restored.forward(h_g, h_l).logits) > 0.0);

  save_checkpoint(path, "{}", saved.params());
  auto params = restored.params();
  load_into(load_checkpoint(path), params);
  CHECK(max_abs_diff(saved.forward(h_g, h_l).logits,
                     restored.forward(h_g, h_l).logits) == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint loading rejects malformed input") {
  const std::string path = temp_path("vg_ckpt_bad.bin");

  {
    std::ofstream out(path, std::ios::binary);
    out << "not a checkpoint";
  }
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  CHECK_THROWS_AS(load_checkpoint(temp_path("vg_ckpt_absent.bin")),
                  ParseError);

  FusionModel model(small_config(FusionKind::Gating));
  save_checkpoint(path, "{}", model.params());
  auto ckpt = load_checkpoint(path);

  // truncation
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(),
              static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);

  // missing tensor
  auto target = model.params();
  Checkpoint short_ckpt = ckpt;
  short_ckpt.params.pop_back();
  CHECK_THROWS_AS(load_into(short_ckpt, target), ParseError);

  // unexpected extra tensor
  Checkpoint extra = ckpt;
  extra.params.emplace_back("mystery", Tensor::row({1.0}));
  CHECK_THROWS_AS(load_into(extra, target), ParseError);

  // shape mismatch
  Checkpoint bad_shape = ckpt;
  bad_shape.params[0].second = Tensor::row({1.0, 2.0});
  CHECK_THROWS_AS(load_into(bad_shape, target), ShapeMismatchError);

  std::remove(path.c_str());
}
