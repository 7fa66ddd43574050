#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vulngraph::tensor {

/// Row-major dense tensor of doubles participating in reverse-mode
/// autodiff. A Tensor is a cheap handle onto a graph node; copying a
/// Tensor aliases the same node. Ops are free functions that record
/// their backward rule on the result node; Tensor::backward() runs the
/// tape in reverse topological order, accumulating gradients by sum
/// wherever a node feeds several consumers.
///
/// The op set carries domain guards (stable sigmoid/softmax/logsumexp,
/// the epsilon guard in l2_normalize_rows, BCE evaluated from logits)
/// so finite inputs never produce NaN/Inf.
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  /// Row vector [1, n].
  static Tensor row(std::vector<double> data, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rows() const;
  std::size_t cols() const;
  bool requires_grad() const;

  std::span<const double> data() const;
  /// Direct mutation is only meant for leaves (parameter updates,
  /// feature fill-in); mutating an interior node invalidates the tape.
  std::span<double> mutable_data();

  double value() const;  // scalar tensors only
  double at(std::size_t i, std::size_t j) const;

  /// Gradient accumulated by the last backward(); empty span until then.
  std::span<const double> grad() const;
  void zero_grad();

  /// Reverse-mode sweep from a scalar root. Seeds d(root)/d(root)=1 and
  /// accumulates into every reachable node with requires_grad set.
  void backward() const;

  /// Detached copy: same values, no history, no grad tracking.
  Tensor detach() const;

  struct Node;
  const std::shared_ptr<Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<Node> node_;
};

// ---- core ops ----

Tensor matmul(const Tensor& a, const Tensor& b);
/// Same-shape add, or [N,d] + [1,d] row broadcast.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
/// Elementwise (Hadamard) product, same shapes.
Tensor mul(const Tensor& a, const Tensor& b);
/// Multiply by a compile-time constant.
Tensor scale(const Tensor& a, double c);
/// Scale row i of x [N,d] by s[i] where s is [N,1].
Tensor scale_rows(const Tensor& x, const Tensor& s);

Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);
/// Stack the given rows of x into a [ids.size(), d] tensor; backward
/// scatter-adds, so repeated ids are fine.
Tensor gather_rows(const Tensor& x, std::vector<std::size_t> ids);

Tensor transpose(const Tensor& a);
Tensor sum(const Tensor& a);                    // scalar
Tensor sum_rows(const Tensor& a);               // [N,d] -> [N,1]
Tensor mean_rows(const Tensor& a);              // [N,d] -> [1,d]

Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double negative_slope = 0.2);
/// tanh approximation of GELU; golden values reproduce at 1e-6 across
/// implementations of the same approximation.
Tensor gelu(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp_op(const Tensor& a);
/// DomainError on any non-positive entry.
Tensor log_op(const Tensor& a);

/// Row-wise softmax, numerically stable (max subtraction).
Tensor softmax_rows(const Tensor& a);
/// Row-wise log-sum-exp, [N,d] -> [N,1].
Tensor logsumexp_rows(const Tensor& a);
/// Two-way softmax over columns of [N,2] computed as a0=sigmoid(e0-e1),
/// a1 = 1-a0, so each row sums to 1.0 exactly in floating point.
Tensor softmax_pair(const Tensor& e);

/// Rows normalized to unit L2 norm with the epsilon guard
/// x / (||x|| + eps); an all-zero row maps to the zero row.
Tensor l2_normalize_rows(const Tensor& a, double eps = 1e-8);

/// Per-row LayerNorm with learnable affine [1,d] gamma/beta.
Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma,
                       const Tensor& beta, double eps = 1e-5);

/// Mean over the batch of the stable binary cross-entropy evaluated
/// directly from logits [N,1]; labels in {0,1}; positives weighted by
/// pos_weight.
Tensor bce_with_logits(const Tensor& logits, const std::vector<double>& labels,
                       double pos_weight = 1.0);

std::string shape_to_string(const Tensor::Shape& s);

}  // namespace vulngraph::tensor
