#pragma once

#include <cstddef>

#include "vulngraph/javacfg/cfg.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::encoders {

inline constexpr std::size_t kMinFeatureDim = javacfg::kNodeKindCount + 1;

/// Initial node features [n, dim]: the first kNodeKindCount channels
/// one-hot the node kind, the rest take a sign-hashed bag of the label
/// tokens. Rows are L2-normalized (never zero thanks to the one-hot).
/// Deterministic: pure function of the CFG. Throws DomainError when
/// dim < kMinFeatureDim.
tensor::Tensor featurize(const javacfg::Cfg& cfg, std::size_t dim);

}  // namespace vulngraph::encoders
