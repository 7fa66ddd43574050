#pragma once

#include <functional>
#include <vector>

#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::tensor {

/// Compares reverse-mode gradients against central finite differences.
///
/// `f` must rebuild the scalar loss from scratch on every call, closing
/// over the tensors in `wrt` (their values are perturbed in place and
/// restored). Returns the worst relative error over all checked
/// coordinates: |g_ad - g_fd| / max(1, |g_ad|, |g_fd|).
double grad_check(const std::function<Tensor()>& f,
                  const std::vector<Tensor>& wrt, double step = 1e-5);

}  // namespace vulngraph::tensor
