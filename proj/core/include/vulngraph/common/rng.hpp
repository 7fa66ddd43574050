#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace vulngraph {

/// Uniform double in [0,1) built directly from mt19937_64 output.
/// std::uniform_real_distribution is implementation-defined, so results
/// would not be reproducible across standard libraries; this is.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(double lo, double hi, std::mt19937_64& rng) {
  return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t sample_uniform(std::size_t n, std::mt19937_64& rng) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) %
         n;
}

/// Samples an index proportionally to non-negative weights.
inline std::size_t sample_weighted(const std::vector<double>& weights,
                                   std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace vulngraph
