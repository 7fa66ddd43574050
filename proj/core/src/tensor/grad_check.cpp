#include "vulngraph/tensor/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace vulngraph::tensor {

double grad_check(const std::function<Tensor()>& f,
                  const std::vector<Tensor>& wrt, double step) {
  for (auto t : wrt) t.zero_grad();
  Tensor loss = f();
  loss.backward();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(wrt.size());
  for (const auto& t : wrt) {
    auto g = t.grad();
    // a parameter the loss never touches has gradient zero
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(t.size(), 0.0);
  }

  double worst = 0.0;
  for (std::size_t k = 0; k < wrt.size(); ++k) {
    Tensor t = wrt[k];
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      double saved = values[i];
      values[i] = saved + step;
      double up = f().value();
      values[i] = saved - step;
      double down = f().value();
      values[i] = saved;
      double fd = (up - down) / (2.0 * step);
      double ad = analytic[k][i];
      double err = std::abs(ad - fd) /
                   std::max({1.0, std::abs(ad), std::abs(fd)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace vulngraph::tensor
