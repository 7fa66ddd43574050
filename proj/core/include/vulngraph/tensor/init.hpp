#pragma once

#include <cmath>
#include <random>

#include "vulngraph/common/rng.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::tensor {

/// Xavier/Glorot uniform init, deterministic under the caller's rng.
inline Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out,
                             std::mt19937_64& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> data(fan_in * fan_out);
  for (auto& v : data) v = uniform_range(-limit, limit, rng);
  return Tensor::from_data({fan_in, fan_out}, std::move(data), true);
}

}  // namespace vulngraph::tensor
