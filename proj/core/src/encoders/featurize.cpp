#include "vulngraph/encoders/featurize.hpp"

#include <cctype>
#include <cmath>
#include <string_view>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/hash.hpp"

namespace vulngraph::encoders {

namespace {

/// Splits a label into identifier/number runs; punctuation separates.
template <typename Fn>
void for_each_token(std::string_view label, Fn&& fn) {
  std::size_t i = 0;
  while (i < label.size()) {
    unsigned char c = static_cast<unsigned char>(label[i]);
    if (std::isalnum(c) || c == '_' || c == '$') {
      std::size_t b = i;
      while (i < label.size() &&
             (std::isalnum(static_cast<unsigned char>(label[i])) ||
              label[i] == '_' || label[i] == '$'))
        ++i;
      fn(label.substr(b, i - b));
    } else {
      ++i;
    }
  }
}

}  // namespace

tensor::Tensor featurize(const javacfg::Cfg& cfg, std::size_t dim) {
  if (dim < kMinFeatureDim)
    throw DomainError("feature dim " + std::to_string(dim) +
                      " below minimum " + std::to_string(kMinFeatureDim));
  std::size_t n = cfg.nodes.size();
  std::size_t hash_dim = dim - javacfg::kNodeKindCount;
  std::vector<double> data(n * dim, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double* row = data.data() + v * dim;
    row[static_cast<std::size_t>(cfg.nodes[v].kind)] = 1.0;
    for_each_token(cfg.nodes[v].label, [&](std::string_view tok) {
      std::uint64_t h = fnv1a64(tok);
      std::size_t idx = javacfg::kNodeKindCount + h % hash_dim;
      double sign = (mix64(h) & 1u) ? 1.0 : -1.0;
      row[idx] += sign;
    });
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) sq += row[j] * row[j];
    double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < dim; ++j) row[j] *= inv;
  }
  return tensor::Tensor::from_data({n, dim}, std::move(data), false);
}

}  // namespace vulngraph::encoders
