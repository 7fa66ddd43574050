#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vulngraph/common/error.hpp"
#include "vulngraph/tensor/adam.hpp"
#include "vulngraph/tensor/grad_check.hpp"
#include "vulngraph/tensor/tensor.hpp"

using namespace vulngraph;
using namespace vulngraph::tensor;

namespace {

Tensor random_tensor(Tensor::Shape shape, std::mt19937_64& rng,
                     double lo = -1.5, double hi = 1.5) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::size_t n = shape.size() == 1 ? shape[0] : shape[0] * shape[1];
  std::vector<double> d(n);
  for (auto& v : d) v = dist(rng);
  return Tensor::from_data(std::move(shape), std::move(d), true);
}

}  // namespace

TEST_CASE("sigmoid at zero: value 0.5, gradient 0.25") {
  Tensor x = Tensor::scalar(0.0, true);
  Tensor y = sum(sigmoid(x));
  CHECK(y.value() == doctest::Approx(0.5).epsilon(1e-15));
  y.backward();
  CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("softmax of uniform row is uniform and sums to one") {
  Tensor x = Tensor::row({0.0, 0.0, 0.0, 0.0});
  Tensor y = softmax_rows(x);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(y.at(0, j) == doctest::Approx(0.25).epsilon(1e-15));
  double s = 0.0;
  for (std::size_t j = 0; j < 4; ++j) s += y.at(0, j);
  CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("softmax is invariant to constant row shifts") {
  Tensor a = Tensor::row({0.3, -1.2, 2.5});
  Tensor b = Tensor::row({0.3 + 7.0, -1.2 + 7.0, 2.5 + 7.0});
  Tensor ya = softmax_rows(a);
  Tensor yb = softmax_rows(b);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(std::abs(ya.at(0, j) - yb.at(0, j)) < 1e-12);
}

TEST_CASE("softmax_pair rows sum to exactly 1.0") {
  Tensor e = Tensor::from_data({3, 2}, {5.0, -2.0, 0.0, 0.0, -30.0, 40.0});
  Tensor a = softmax_pair(e);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.at(i, 0) + a.at(i, 1) == 1.0);  // exact, not approximate
    CHECK(a.at(i, 0) >= 0.0);
    CHECK(a.at(i, 1) >= 0.0);
  }
  CHECK(a.at(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("softmax_pair known log-odds oracle") {
  // e0 - e1 = ln 3  =>  a0 = 3/4
  Tensor e = Tensor::from_data({1, 2}, {std::log(3.0), 0.0});
  Tensor a = softmax_pair(e);
  CHECK(a.at(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(a.at(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("layer_norm maps a constant row to beta") {
  Tensor x = Tensor::from_data({2, 4}, {3.0, 3.0, 3.0, 3.0,
                                        -7.5, -7.5, -7.5, -7.5});
  Tensor gamma = Tensor::full({1, 4}, 2.0);
  Tensor beta = Tensor::row({0.1, 0.2, 0.3, 0.4});
  Tensor y = layer_norm_rows(x, gamma, beta);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(y.at(i, j) == doctest::Approx(beta.at(0, j)).epsilon(1e-9));
}

TEST_CASE("layer_norm output has zero mean and unit variance per row") {
  std::mt19937_64 rng(7);
  Tensor x = random_tensor({3, 8}, rng);
  Tensor gamma = Tensor::full({1, 8}, 1.0);
  Tensor beta = Tensor::zeros({1, 8});
  Tensor y = layer_norm_rows(x, gamma, beta);
  for (std::size_t i = 0; i < 3; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < 8; ++j) mean += y.at(i, j);
    mean /= 8.0;
    double var = 0.0;
    for (std::size_t j = 0; j < 8; ++j)
      var += (y.at(i, j) - mean) * (y.at(i, j) - mean);
    var /= 8.0;
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("l2_normalize produces unit rows; zero rows stay zero") {
  Tensor x = Tensor::from_data({2, 3}, {3.0, 4.0, 0.0, 0.0, 0.0, 0.0});
  Tensor y = l2_normalize_rows(x);
  double n0 = std::sqrt(y.at(0, 0) * y.at(0, 0) + y.at(0, 1) * y.at(0, 1) +
                        y.at(0, 2) * y.at(0, 2));
  CHECK(n0 > 1.0 - 1e-8);
  CHECK(n0 <= 1.0 + 1e-12);
  for (std::size_t j = 0; j < 3; ++j) CHECK(y.at(1, j) == 0.0);
}

TEST_CASE("matmul matches a hand-computed product") {
  Tensor a = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::from_data({3, 2}, {7, 8, 9, 10, 11, 12});
  Tensor c = matmul(a, b);
  CHECK(c.at(0, 0) == 58.0);
  CHECK(c.at(0, 1) == 64.0);
  CHECK(c.at(1, 0) == 139.0);
  CHECK(c.at(1, 1) == 154.0);
}

TEST_CASE("logsumexp of two zeros is ln 2") {
  Tensor x = Tensor::from_data({1, 2}, {0.0, 0.0});
  CHECK(logsumexp_rows(x).at(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("bce_with_logits closed-form oracles") {
  // logit 0 vs label 1: -ln(1/2) = ln 2
  Tensor s1 = Tensor::from_data({1, 1}, {0.0});
  CHECK(bce_with_logits(s1, {1.0}).value() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // p = 0.9 twice (once each label direction): mean loss is -ln 0.9
  double l9 = std::log(9.0);
  Tensor s2 = Tensor::from_data({2, 1}, {l9, -l9});
  CHECK(bce_with_logits(s2, {1.0, 0.0}).value() ==
        doctest::Approx(-std::log(0.9)).epsilon(1e-12));

  // pos_weight scales the positive term only
  Tensor s3 = Tensor::from_data({1, 1}, {0.0});
  CHECK(bce_with_logits(s3, {1.0}, 2.0).value() ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bce gradient equals sigma(s) - y scaled by 1/N") {
  Tensor s = Tensor::from_data({2, 1}, {0.0, 0.0}, true);
  Tensor loss = bce_with_logits(s, {1.0, 0.0});
  loss.backward();
  CHECK(s.grad()[0] == doctest::Approx(-0.25).epsilon(1e-12));  // (0.5-1)/2
  CHECK(s.grad()[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gradients accumulate across reuse of the same tensor") {
  Tensor x = Tensor::scalar(3.0, true);
  Tensor y = sum(add(x, x));
  y.backward();
  CHECK(x.grad()[0] == 2.0);

  Tensor z = Tensor::scalar(5.0, true);
  Tensor w = sum(add(mul(z, z), mul(z, z)));  // 2z^2, dw/dz = 4z
  w.backward();
  CHECK(z.grad()[0] == 20.0);
}

TEST_CASE("constant inputs receive no gradient") {
  Tensor c = Tensor::scalar(2.0, false);
  Tensor x = Tensor::scalar(4.0, true);
  Tensor y = sum(mul(c, x));
  y.backward();
  CHECK(c.grad().empty());
  CHECK(x.grad()[0] == 2.0);
}

TEST_CASE("broadcast bias gradient is the column sum") {
  Tensor x = Tensor::from_data({3, 2}, {1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::from_data({1, 2}, {0.0, 0.0}, true);
  Tensor y = sum(add(x, b));
  y.backward();
  CHECK(b.grad()[0] == 3.0);
  CHECK(b.grad()[1] == 3.0);
}

TEST_CASE("grad_check: quadratic form") {
  std::mt19937_64 rng(11);
  Tensor x = random_tensor({3, 4}, rng);
  auto f = [&] { return sum(mul(x, x)); };
  CHECK(grad_check(f, {x}) < 1e-7);
}

TEST_CASE("grad_check: matmul chain with bias and relu-family activations") {
  std::mt19937_64 rng(23);
  Tensor x = random_tensor({4, 3}, rng);
  Tensor w1 = random_tensor({3, 5}, rng);
  Tensor b1 = random_tensor({1, 5}, rng);
  Tensor w2 = random_tensor({5, 2}, rng);
  auto f = [&] {
    Tensor h = gelu(add(matmul(x, w1), b1));
    Tensor o = tanh_op(matmul(h, w2));
    return sum(mul(o, o));
  };
  CHECK(grad_check(f, {x, w1, b1, w2}) < 1e-6);
}

TEST_CASE("grad_check: softmax, logsumexp, normalize, layer_norm") {
  std::mt19937_64 rng(37);
  Tensor x = random_tensor({3, 4}, rng);
  Tensor gamma = random_tensor({1, 4}, rng, 0.5, 1.5);
  Tensor beta = random_tensor({1, 4}, rng);
  auto f = [&] {
    Tensor sm = softmax_rows(x);
    Tensor lse = logsumexp_rows(scale(x, 0.7));
    Tensor nm = l2_normalize_rows(x);
    Tensor ln = layer_norm_rows(x, gamma, beta);
    return add(add(sum(mul(sm, sm)), sum(lse)),
               add(sum(mul(nm, nm)), sum(sigmoid(ln))));
  };
  CHECK(grad_check(f, {x, gamma, beta}) < 1e-6);
}

TEST_CASE("grad_check: slicing, gathering, concatenation, pooling") {
  std::mt19937_64 rng(41);
  Tensor x = random_tensor({4, 3}, rng);
  Tensor y = random_tensor({4, 2}, rng);
  auto f = [&] {
    Tensor cat = concat_cols(x, y);                  // [4,5]
    Tensor top = slice_rows(cat, 0, 2);              // [2,5]
    Tensor mid = slice_cols(cat, 1, 4);              // [4,3]
    Tensor g = gather_rows(cat, {3, 0, 3});          // repeated row
    Tensor stack = concat_rows({top, g});            // [5,5]
    Tensor pooled = mean_rows(stack);                // [1,5]
    return add(sum(mul(pooled, pooled)),
               add(sum(sum_rows(mid)), sum(transpose(g))));
  };
  CHECK(grad_check(f, {x, y}) < 1e-6);
}

TEST_CASE("grad_check: softmax_pair, scale_rows, exp/log, leaky_relu") {
  std::mt19937_64 rng(53);
  Tensor e = random_tensor({3, 2}, rng);
  Tensor x = random_tensor({3, 4}, rng);
  auto f = [&] {
    Tensor a = softmax_pair(e);
    Tensor ag = slice_cols(a, 0, 1);                 // [3,1]
    Tensor scaled = scale_rows(x, ag);
    Tensor pos = exp_op(scaled);                     // > 0, safe for log
    return add(sum(log_op(pos)), sum(leaky_relu(sub(scaled, x))));
  };
  CHECK(grad_check(f, {e, x}) < 1e-6);
}

TEST_CASE("grad_check: bce_with_logits with pos_weight") {
  std::mt19937_64 rng(59);
  Tensor s = random_tensor({5, 1}, rng);
  std::vector<double> labels = {1.0, 0.0, 1.0, 1.0, 0.0};
  auto f = [&] { return bce_with_logits(s, labels, 1.5); };
  CHECK(grad_check(f, {s}) < 1e-7);
}

TEST_CASE("Adam drives a quadratic toward its minimum") {
  Tensor x = Tensor::from_data({1, 3}, {10.0, -4.0, 0.5}, true);
  Adam opt({x}, {.lr = 0.05});
  for (int it = 0; it < 500; ++it) {
    opt.zero_grad();
    Tensor target = Tensor::row({3.0, 3.0, 3.0});
    Tensor diff = sub(x, target);
    Tensor loss = sum(mul(diff, diff));
    loss.backward();
    opt.step();
  }
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(x.at(0, j) == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("shape and domain violations throw typed errors") {
  Tensor a = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from_data({3, 2}, {1, 2, 3, 4, 5, 6});
  CHECK_THROWS_AS((void)add(a, b), ShapeMismatchError);
  CHECK_THROWS_AS((void)matmul(a, b), ShapeMismatchError);
  CHECK_THROWS_AS((void)log_op(Tensor::scalar(-1.0)), DomainError);
  CHECK_THROWS_AS(a.value(), ShapeMismatchError);
  CHECK_THROWS_AS(Tensor::from_data({2, 2}, {1.0}), ShapeMismatchError);
  Tensor nonscalar = Tensor::from_data({1, 2}, {1.0, 2.0}, true);
  CHECK_THROWS_AS(nonscalar.backward(), ShapeMismatchError);
}

TEST_CASE("detach cuts the tape") {
  Tensor x = Tensor::scalar(2.0, true);
  Tensor y = mul(x, x).detach();
  Tensor z = sum(mul(y, y));
  z.backward();
  CHECK(x.grad().empty());
  CHECK(y.requires_grad() == false);
}
