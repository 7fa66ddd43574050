#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "vulngraph/encoders/encoder.hpp"
#include "vulngraph/fusion/fusion.hpp"
#include "vulngraph/javacfg/cfg.hpp"
#include "vulngraph/javacfg/parser.hpp"
#include "vulngraph/tensor/init.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace {

using namespace vulngraph;

// A method with branches, a loop, and try/catch — roughly the shape of
// real corpus entries, so parse/build numbers mean something.
const std::string kSource = R"(
class Runner {
    int process(String cmd, int retries) {
        if (cmd == null) {
            return -1;
        }
        int code = 0;
        for (int i = 0; i < retries; i = i + 1) {
            try {
                Process p = Runtime.getRuntime().exec(cmd);
                code = p.waitFor();
                if (code == 0) {
                    break;
                }
            } catch (Exception e) {
                log.warn(e.getMessage());
                code = 1;
            }
        }
        while (code > 10) {
            code = code - 1;
        }
        return code;
    }
}
)";

tensor::Tensor random_matrix(std::size_t rows, std::size_t cols,
                             std::uint64_t seed, bool requires_grad) {
  std::mt19937_64 rng(seed);
  std::vector<double> data(rows * cols);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (auto& v : data) v = dist(rng);
  return tensor::Tensor::from_data({rows, cols}, std::move(data),
                                   requires_grad);
}

void BM_ParseJava(benchmark::State& state) {
  for (auto _ : state) {
    auto methods = javacfg::parse_java(kSource);
    benchmark::DoNotOptimize(methods);
  }
}
BENCHMARK(BM_ParseJava);

void BM_BuildCfg(benchmark::State& state) {
  const auto methods = javacfg::parse_java(kSource);
  for (auto _ : state) {
    auto cfg = javacfg::build_cfg(methods.front());
    benchmark::DoNotOptimize(cfg);
  }
}
BENCHMARK(BM_BuildCfg);

void BM_MatmulForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_matrix(n, n, 1, false);
  auto b = random_matrix(n, n, 2, false);
  for (auto _ : state) {
    auto c = tensor::matmul(a, b);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_MatmulForward)->Arg(32)->Arg(64)->Arg(128);

void BM_MatmulBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto a = random_matrix(n, n, 1, true);
    auto b = random_matrix(n, n, 2, true);
    auto loss = tensor::sum(tensor::relu(tensor::matmul(a, b)));
    loss.backward();
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(BM_MatmulBackward)->Arg(32)->Arg(64);

void BM_EncoderPrepare(benchmark::State& state) {
  const auto methods = javacfg::parse_java(kSource);
  const auto cfg = javacfg::build_cfg(methods.front());
  encoders::EncoderConfig ec;
  ec.d_in = 64;
  const encoders::GraphEncoder enc(ec);
  for (auto _ : state) {
    auto prepared = enc.prepare(cfg);
    benchmark::DoNotOptimize(prepared);
  }
}
BENCHMARK(BM_EncoderPrepare);

void encode_bench(benchmark::State& state, encoders::EncoderKind kind) {
  const auto methods = javacfg::parse_java(kSource);
  const auto cfg = javacfg::build_cfg(methods.front());
  encoders::EncoderConfig ec;
  ec.kind = kind;
  ec.d_in = 64;
  const encoders::GraphEncoder enc(ec);
  const auto prepared = enc.prepare(cfg);
  for (auto _ : state) {
    auto pooled = enc.encode(prepared);
    benchmark::DoNotOptimize(pooled);
  }
}

void BM_GcnEncode(benchmark::State& state) {
  encode_bench(state, encoders::EncoderKind::Gcn);
}
BENCHMARK(BM_GcnEncode);

void BM_GatEncode(benchmark::State& state) {
  encode_bench(state, encoders::EncoderKind::Gat);
}
BENCHMARK(BM_GatEncode);

void BM_SageEncode(benchmark::State& state) {
  encode_bench(state, encoders::EncoderKind::Sage);
}
BENCHMARK(BM_SageEncode);

void BM_FusionForward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  fusion::FusionConfig fc;
  const fusion::FusionModel model(fc);
  auto h_graph = random_matrix(batch, fc.d_graph, 3, false);
  auto h_lang = random_matrix(batch, fc.d_lang, 4, false);
  for (auto _ : state) {
    auto out = model.forward(h_graph, h_lang);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_FusionForward)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
