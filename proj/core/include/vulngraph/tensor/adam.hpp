#pragma once

#include <cstddef>
#include <vector>

#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::tensor {

/// Adam with bias correction (Kingma & Ba). Holds first/second moment
/// buffers per registered parameter; step order is deterministic.
class Adam {
 public:
  struct Options {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  explicit Adam(std::vector<Tensor> params) : Adam(std::move(params), Options()) {}
  Adam(std::vector<Tensor> params, Options opts);

  /// Applies one update from the gradients currently stored on the
  /// parameters, then leaves the gradients untouched (call zero_grad()
  /// via this optimizer or per tensor before the next backward).
  void step();
  void zero_grad();

  const std::vector<Tensor>& params() const { return params_; }
  std::size_t steps_taken() const { return t_; }

 private:
  std::vector<Tensor> params_;
  Options opts_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t t_ = 0;
};

}  // namespace vulngraph::tensor
