#include "vulngraph/tensor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "vulngraph/common/error.hpp"

namespace vulngraph::tensor {

struct Tensor::Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until backward touches it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  std::size_t rows() const { return shape[0]; }
  std::size_t cols() const { return shape[1]; }
  std::size_t size() const { return value.size(); }

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

namespace {

using Node = Tensor::Node;

Tensor::Shape normalize(Tensor::Shape s) {
  if (s.size() == 1) return {1, s[0]};
  if (s.size() != 2)
    throw ShapeMismatchError("tensor", "rank 1 or 2",
                             shape_to_string(s));
  return s;
}

std::shared_ptr<Node> make_leaf(Tensor::Shape shape, std::vector<double> data,
                                bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->shape = normalize(std::move(shape));
  std::size_t want = n->shape[0] * n->shape[1];
  if (data.size() != want)
    throw ShapeMismatchError("tensor data", std::to_string(want) + " values",
                             std::to_string(data.size()) + " values");
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return n;
}

/// Result node; parents/backward recorded only when a parent tracks
/// gradients, so constant subgraphs stay unlinked.
Tensor make_op(Tensor::Shape shape, std::vector<double> value,
               std::vector<std::shared_ptr<Node>> parents,
               std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->shape = normalize(std::move(shape));
  n->value = std::move(value);
  bool track = false;
  for (const auto& p : parents) track = track || p->requires_grad;
  if (track) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward_fn = std::move(backward);
  }
  return Tensor(std::move(n));
}

void check_same_shape(const char* op, const Node& a, const Node& b) {
  if (a.shape != b.shape)
    throw ShapeMismatchError(op, shape_to_string(a.shape),
                             shape_to_string(b.shape));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

/// Elementwise op skeleton: y_i = f(x_i), dx_i += dy_i * dfdx(x_i, y_i).
Tensor unary_elementwise(const Tensor& a, double (*f)(double),
                         double (*dfdx)(double x, double y)) {
  const auto& an = a.node();
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(an->value[i]);
  Node* ap = an.get();
  return make_op(an->shape, std::move(out), {an}, [ap, dfdx](Node& self) {
    if (!ap->requires_grad) return;
    ap->ensure_grad();
    for (std::size_t i = 0; i < self.size(); ++i)
      ap->grad[i] += self.grad[i] * dfdx(ap->value[i], self.value[i]);
  });
}

}  // namespace

// ---- factories / accessors ----

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  Shape s = normalize(std::move(shape));
  std::vector<double> d(s[0] * s[1], 0.0);
  return Tensor(make_leaf(std::move(s), std::move(d), requires_grad));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  Shape s = normalize(std::move(shape));
  std::vector<double> d(s[0] * s[1], value);
  return Tensor(make_leaf(std::move(s), std::move(d), requires_grad));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data,
                         bool requires_grad) {
  return Tensor(make_leaf(std::move(shape), std::move(data), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({1, 1}, {value}, requires_grad);
}

Tensor Tensor::row(std::vector<double> data, bool requires_grad) {
  std::size_t n = data.size();
  return from_data({1, n}, std::move(data), requires_grad);
}

const Tensor::Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::size() const { return node_->size(); }
std::size_t Tensor::rows() const { return node_->rows(); }
std::size_t Tensor::cols() const { return node_->cols(); }
bool Tensor::requires_grad() const { return node_->requires_grad; }

std::span<const double> Tensor::data() const { return node_->value; }
std::span<double> Tensor::mutable_data() { return node_->value; }

double Tensor::value() const {
  if (node_->size() != 1)
    throw ShapeMismatchError("scalar read", "[1,1]",
                             shape_to_string(node_->shape));
  return node_->value[0];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return node_->value[i * node_->cols() + j];
}

std::span<const double> Tensor::grad() const { return node_->grad; }

void Tensor::zero_grad() { node_->grad.clear(); }

Tensor Tensor::detach() const {
  return Tensor(make_leaf(node_->shape, node_->value, false));
}

void Tensor::backward() const {
  if (node_->size() != 1)
    throw ShapeMismatchError("backward root", "[1,1]",
                             shape_to_string(node_->shape));
  // Iterative postorder over parents; reverse postorder visits each
  // node only after all of its consumers, so sums accumulate correctly.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    if (i < n->parents.size()) {
      Node* p = n->parents[i++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  node_->grad.assign(1, 1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

std::string shape_to_string(const Tensor::Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// ---- linear algebra ----

Tensor matmul(const Tensor& a, const Tensor& b) {
  const auto& an = a.node();
  const auto& bn = b.node();
  if (an->cols() != bn->rows())
    throw ShapeMismatchError("matmul", shape_to_string(an->shape) + " x [" +
                                           std::to_string(an->cols()) + ",*]",
                             shape_to_string(bn->shape));
  std::size_t n = an->rows(), k = an->cols(), m = bn->cols();
  std::vector<double> out(n * m, 0.0);
  const double* A = an->value.data();
  const double* B = bn->value.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = B + p * m;
      double* crow = out.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
    }
  }
  Node* ap = an.get();
  Node* bp = bn.get();
  return make_op({n, m}, std::move(out), {an, bn},
                 [ap, bp, n, k, m](Node& self) {
                   const double* G = self.grad.data();
                   if (ap->requires_grad) {
                     ap->ensure_grad();
                     // dA = G B^T
                     const double* B = bp->value.data();
                     for (std::size_t i = 0; i < n; ++i)
                       for (std::size_t p = 0; p < k; ++p) {
                         double acc = 0.0;
                         const double* grow = G + i * m;
                         const double* brow = B + p * m;
                         for (std::size_t j = 0; j < m; ++j)
                           acc += grow[j] * brow[j];
                         ap->grad[i * k + p] += acc;
                       }
                   }
                   if (bp->requires_grad) {
                     bp->ensure_grad();
                     // dB = A^T G
                     const double* A = ap->value.data();
                     for (std::size_t i = 0; i < n; ++i) {
                       const double* grow = G + i * m;
                       for (std::size_t p = 0; p < k; ++p) {
                         double aip = A[i * k + p];
                         if (aip == 0.0) continue;
                         double* brow = bp->grad.data() + p * m;
                         for (std::size_t j = 0; j < m; ++j)
                           brow[j] += aip * grow[j];
                       }
                     }
                   }
                 });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const auto& an = a.node();
  const auto& bn = b.node();
  bool broadcast = bn->rows() == 1 && an->rows() > 1 && an->cols() == bn->cols();
  if (!broadcast) check_same_shape("add", *an, *bn);
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out[i * cols + j] =
          an->value[i * cols + j] + bn->value[broadcast ? j : i * cols + j];
  Node* ap = an.get();
  Node* bp = bn.get();
  return make_op(an->shape, std::move(out), {an, bn},
                 [ap, bp, rows, cols, broadcast](Node& self) {
                   if (ap->requires_grad) {
                     ap->ensure_grad();
                     for (std::size_t i = 0; i < self.size(); ++i)
                       ap->grad[i] += self.grad[i];
                   }
                   if (bp->requires_grad) {
                     bp->ensure_grad();
                     if (broadcast) {
                       for (std::size_t i = 0; i < rows; ++i)
                         for (std::size_t j = 0; j < cols; ++j)
                           bp->grad[j] += self.grad[i * cols + j];
                     } else {
                       for (std::size_t i = 0; i < self.size(); ++i)
                         bp->grad[i] += self.grad[i];
                     }
                   }
                 });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  const auto& an = a.node();
  const auto& bn = b.node();
  check_same_shape("sub", *an, *bn);
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = an->value[i] - bn->value[i];
  Node* ap = an.get();
  Node* bp = bn.get();
  return make_op(an->shape, std::move(out), {an, bn}, [ap, bp](Node& self) {
    if (ap->requires_grad) {
      ap->ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        ap->grad[i] += self.grad[i];
    }
    if (bp->requires_grad) {
      bp->ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        bp->grad[i] -= self.grad[i];
    }
  });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor mul(const Tensor& a, const Tensor& b) {
  const auto& an = a.node();
  const auto& bn = b.node();
  check_same_shape("mul", *an, *bn);
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = an->value[i] * bn->value[i];
  Node* ap = an.get();
  Node* bp = bn.get();
  return make_op(an->shape, std::move(out), {an, bn}, [ap, bp](Node& self) {
    if (ap->requires_grad) {
      ap->ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        ap->grad[i] += self.grad[i] * bp->value[i];
    }
    if (bp->requires_grad) {
      bp->ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        bp->grad[i] += self.grad[i] * ap->value[i];
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  const auto& an = a.node();
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * an->value[i];
  Node* ap = an.get();
  return make_op(an->shape, std::move(out), {an}, [ap, c](Node& self) {
    if (!ap->requires_grad) return;
    ap->ensure_grad();
    for (std::size_t i = 0; i < self.size(); ++i)
      ap->grad[i] += c * self.grad[i];
  });
}

Tensor scale_rows(const Tensor& x, const Tensor& s) {
  const auto& xn = x.node();
  const auto& sn = s.node();
  if (sn->rows() != xn->rows() || sn->cols() != 1)
    throw ShapeMismatchError("scale_rows scale",
                             "[" + std::to_string(xn->rows()) + ",1]",
                             shape_to_string(sn->shape));
  std::size_t rows = xn->rows(), cols = xn->cols();
  std::vector<double> out(xn->size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out[i * cols + j] = xn->value[i * cols + j] * sn->value[i];
  Node* xp = xn.get();
  Node* sp = sn.get();
  return make_op(xn->shape, std::move(out), {xn, sn},
                 [xp, sp, rows, cols](Node& self) {
                   if (xp->requires_grad) {
                     xp->ensure_grad();
                     for (std::size_t i = 0; i < rows; ++i)
                       for (std::size_t j = 0; j < cols; ++j)
                         xp->grad[i * cols + j] +=
                             self.grad[i * cols + j] * sp->value[i];
                   }
                   if (sp->requires_grad) {
                     sp->ensure_grad();
                     for (std::size_t i = 0; i < rows; ++i) {
                       double acc = 0.0;
                       for (std::size_t j = 0; j < cols; ++j)
                         acc += self.grad[i * cols + j] *
                                xp->value[i * cols + j];
                       sp->grad[i] += acc;
                     }
                   }
                 });
}

// ---- concatenation / slicing ----

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  const auto& an = a.node();
  const auto& bn = b.node();
  if (an->rows() != bn->rows())
    throw ShapeMismatchError("concat_cols",
                             "[" + std::to_string(an->rows()) + ",*]",
                             shape_to_string(bn->shape));
  std::size_t rows = an->rows(), ca = an->cols(), cb = bn->cols();
  std::vector<double> out(rows * (ca + cb));
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy_n(an->value.begin() + i * ca, ca, out.begin() + i * (ca + cb));
    std::copy_n(bn->value.begin() + i * cb, cb,
                out.begin() + i * (ca + cb) + ca);
  }
  Node* ap = an.get();
  Node* bp = bn.get();
  return make_op({rows, ca + cb}, std::move(out), {an, bn},
                 [ap, bp, rows, ca, cb](Node& self) {
                   std::size_t c = ca + cb;
                   if (ap->requires_grad) {
                     ap->ensure_grad();
                     for (std::size_t i = 0; i < rows; ++i)
                       for (std::size_t j = 0; j < ca; ++j)
                         ap->grad[i * ca + j] += self.grad[i * c + j];
                   }
                   if (bp->requires_grad) {
                     bp->ensure_grad();
                     for (std::size_t i = 0; i < rows; ++i)
                       for (std::size_t j = 0; j < cb; ++j)
                         bp->grad[i * cb + j] += self.grad[i * c + ca + j];
                   }
                 });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeMismatchError("concat_rows", ">=1 part", "0");
  std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  std::vector<std::shared_ptr<Node>> parents;
  parents.reserve(parts.size());
  for (const auto& p : parts) {
    if (p.cols() != cols)
      throw ShapeMismatchError("concat_rows", "[*," + std::to_string(cols) + "]",
                               shape_to_string(p.shape()));
    rows += p.rows();
    parents.push_back(p.node());
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& p : parents)
    out.insert(out.end(), p->value.begin(), p->value.end());
  std::vector<Node*> raw;
  raw.reserve(parents.size());
  for (const auto& p : parents) raw.push_back(p.get());
  return make_op({rows, cols}, std::move(out), std::move(parents),
                 [raw](Node& self) {
                   std::size_t offset = 0;
                   for (Node* p : raw) {
                     if (p->requires_grad) {
                       p->ensure_grad();
                       for (std::size_t i = 0; i < p->size(); ++i)
                         p->grad[i] += self.grad[offset + i];
                     }
                     offset += p->size();
                   }
                 });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
  const auto& an = a.node();
  if (begin > end || end > an->rows())
    throw ShapeMismatchError("slice_rows",
                             "range within " + std::to_string(an->rows()),
                             std::to_string(begin) + ".." + std::to_string(end));
  std::size_t cols = an->cols(), rows = end - begin;
  std::vector<double> out(an->value.begin() + begin * cols,
                          an->value.begin() + end * cols);
  Node* ap = an.get();
  return make_op({rows, cols}, std::move(out), {an},
                 [ap, begin, cols](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < self.size(); ++i)
                     ap->grad[begin * cols + i] += self.grad[i];
                 });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  const auto& an = a.node();
  if (begin > end || end > an->cols())
    throw ShapeMismatchError("slice_cols",
                             "range within " + std::to_string(an->cols()),
                             std::to_string(begin) + ".." + std::to_string(end));
  std::size_t rows = an->rows(), cols = an->cols(), width = end - begin;
  std::vector<double> out(rows * width);
  for (std::size_t i = 0; i < rows; ++i)
    std::copy_n(an->value.begin() + i * cols + begin, width,
                out.begin() + i * width);
  Node* ap = an.get();
  return make_op({rows, width}, std::move(out), {an},
                 [ap, begin, rows, cols, width](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < rows; ++i)
                     for (std::size_t j = 0; j < width; ++j)
                       ap->grad[i * cols + begin + j] +=
                           self.grad[i * width + j];
                 });
}

Tensor gather_rows(const Tensor& x, std::vector<std::size_t> ids) {
  const auto& xn = x.node();
  std::size_t cols = xn->cols();
  for (std::size_t id : ids)
    if (id >= xn->rows())
      throw ShapeMismatchError("gather_rows",
                               "row < " + std::to_string(xn->rows()),
                               std::to_string(id));
  std::vector<double> out(ids.size() * cols);
  for (std::size_t t = 0; t < ids.size(); ++t)
    std::copy_n(xn->value.begin() + ids[t] * cols, cols,
                out.begin() + t * cols);
  Node* xp = xn.get();
  auto idv = std::make_shared<std::vector<std::size_t>>(std::move(ids));
  return make_op({idv->size(), cols}, std::move(out), {xn},
                 [xp, idv, cols](Node& self) {
                   if (!xp->requires_grad) return;
                   xp->ensure_grad();
                   for (std::size_t t = 0; t < idv->size(); ++t)
                     for (std::size_t j = 0; j < cols; ++j)
                       xp->grad[(*idv)[t] * cols + j] +=
                           self.grad[t * cols + j];
                 });
}

Tensor transpose(const Tensor& a) {
  const auto& an = a.node();
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out[j * rows + i] = an->value[i * cols + j];
  Node* ap = an.get();
  return make_op({cols, rows}, std::move(out), {an},
                 [ap, rows, cols](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < rows; ++i)
                     for (std::size_t j = 0; j < cols; ++j)
                       ap->grad[i * cols + j] += self.grad[j * rows + i];
                 });
}

// ---- reductions ----

Tensor sum(const Tensor& a) {
  const auto& an = a.node();
  double acc = 0.0;
  for (double v : an->value) acc += v;
  Node* ap = an.get();
  return make_op({1, 1}, {acc}, {an}, [ap](Node& self) {
    if (!ap->requires_grad) return;
    ap->ensure_grad();
    for (std::size_t i = 0; i < ap->size(); ++i) ap->grad[i] += self.grad[0];
  });
}

Tensor sum_rows(const Tensor& a) {
  const auto& an = a.node();
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i] += an->value[i * cols + j];
  Node* ap = an.get();
  return make_op({rows, 1}, std::move(out), {an},
                 [ap, rows, cols](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < rows; ++i)
                     for (std::size_t j = 0; j < cols; ++j)
                       ap->grad[i * cols + j] += self.grad[i];
                 });
}

Tensor mean_rows(const Tensor& a) {
  const auto& an = a.node();
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[j] += an->value[i * cols + j];
  for (double& v : out) v /= static_cast<double>(rows);
  Node* ap = an.get();
  return make_op({1, cols}, std::move(out), {an},
                 [ap, rows, cols](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   double inv = 1.0 / static_cast<double>(rows);
                   for (std::size_t i = 0; i < rows; ++i)
                     for (std::size_t j = 0; j < cols; ++j)
                       ap->grad[i * cols + j] += self.grad[j] * inv;
                 });
}

// ---- nonlinearities ----

Tensor relu(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& a, double negative_slope) {
  const auto& an = a.node();
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = an->value[i];
    out[i] = x > 0.0 ? x : negative_slope * x;
  }
  Node* ap = an.get();
  return make_op(an->shape, std::move(out), {an},
                 [ap, negative_slope](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < self.size(); ++i)
                     ap->grad[i] += self.grad[i] *
                                    (ap->value[i] > 0.0 ? 1.0 : negative_slope);
                 });
}

namespace {
constexpr double kGeluC0 = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluC1 = 0.044715;
}  // namespace

Tensor gelu(const Tensor& a) {
  return unary_elementwise(
      a,
      [](double x) {
        double u = kGeluC0 * (x + kGeluC1 * x * x * x);
        return 0.5 * x * (1.0 + std::tanh(u));
      },
      [](double x, double) {
        double u = kGeluC0 * (x + kGeluC1 * x * x * x);
        double t = std::tanh(u);
        double du = kGeluC0 * (1.0 + 3.0 * kGeluC1 * x * x);
        return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
      });
}

Tensor tanh_op(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return stable_sigmoid(x); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor exp_op(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor log_op(const Tensor& a) {
  const auto& an = a.node();
  for (double v : an->value)
    if (!(v > 0.0))
      throw DomainError("log of non-positive value " + std::to_string(v));
  return unary_elementwise(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

// ---- softmax family ----

Tensor softmax_rows(const Tensor& a) {
  const auto& an = a.node();
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(an->size());
  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = an->value.data() + i * cols;
    double m = *std::max_element(x, x + cols);
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      out[i * cols + j] = std::exp(x[j] - m);
      z += out[i * cols + j];
    }
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] /= z;
  }
  Node* ap = an.get();
  return make_op(an->shape, std::move(out), {an},
                 [ap, rows, cols](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < rows; ++i) {
                     const double* y = self.value.data() + i * cols;
                     const double* g = self.grad.data() + i * cols;
                     double dot = 0.0;
                     for (std::size_t j = 0; j < cols; ++j) dot += g[j] * y[j];
                     for (std::size_t j = 0; j < cols; ++j)
                       ap->grad[i * cols + j] += y[j] * (g[j] - dot);
                   }
                 });
}

Tensor logsumexp_rows(const Tensor& a) {
  const auto& an = a.node();
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = an->value.data() + i * cols;
    double m = *std::max_element(x, x + cols);
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j) z += std::exp(x[j] - m);
    out[i] = m + std::log(z);
  }
  Node* ap = an.get();
  return make_op({rows, 1}, std::move(out), {an},
                 [ap, rows, cols](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < rows; ++i) {
                     double lse = self.value[i];
                     double g = self.grad[i];
                     for (std::size_t j = 0; j < cols; ++j)
                       ap->grad[i * cols + j] +=
                           g * std::exp(ap->value[i * cols + j] - lse);
                   }
                 });
}

Tensor softmax_pair(const Tensor& e) {
  const auto& en = e.node();
  if (en->cols() != 2)
    throw ShapeMismatchError("softmax_pair", "[N,2]",
                             shape_to_string(en->shape));
  std::size_t rows = en->rows();
  std::vector<double> out(rows * 2);
  for (std::size_t i = 0; i < rows; ++i) {
    double a0 = stable_sigmoid(en->value[i * 2] - en->value[i * 2 + 1]);
    out[i * 2] = a0;
    out[i * 2 + 1] = 1.0 - a0;  // the pair sums to 1.0 exactly
  }
  Node* ep = en.get();
  return make_op({rows, 2}, std::move(out), {en}, [ep, rows](Node& self) {
    if (!ep->requires_grad) return;
    ep->ensure_grad();
    for (std::size_t i = 0; i < rows; ++i) {
      double a0 = self.value[i * 2];
      double a1 = self.value[i * 2 + 1];
      double j = a0 * a1;  // softmax Jacobian term for two classes
      double d = self.grad[i * 2] - self.grad[i * 2 + 1];
      ep->grad[i * 2] += j * d;
      ep->grad[i * 2 + 1] -= j * d;
    }
  });
}

Tensor l2_normalize_rows(const Tensor& a, double eps) {
  const auto& an = a.node();
  std::size_t rows = an->rows(), cols = an->cols();
  std::vector<double> out(an->size());
  std::vector<double> norms(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double v = an->value[i * cols + j];
      sq += v * v;
    }
    double n = std::sqrt(sq);
    norms[i] = n;
    double inv = 1.0 / (n + eps);
    for (std::size_t j = 0; j < cols; ++j)
      out[i * cols + j] = an->value[i * cols + j] * inv;
  }
  Node* ap = an.get();
  auto norms_ptr = std::make_shared<std::vector<double>>(std::move(norms));
  return make_op(an->shape, std::move(out), {an},
                 [ap, rows, cols, eps, norms_ptr](Node& self) {
                   if (!ap->requires_grad) return;
                   ap->ensure_grad();
                   for (std::size_t i = 0; i < rows; ++i) {
                     double n = (*norms_ptr)[i];
                     if (n == 0.0) continue;  // zero row stays constant
                     double s = n + eps;
                     const double* x = ap->value.data() + i * cols;
                     const double* g = self.grad.data() + i * cols;
                     double dot = 0.0;
                     for (std::size_t j = 0; j < cols; ++j) dot += g[j] * x[j];
                     double coef = dot / (n * s * s);
                     for (std::size_t j = 0; j < cols; ++j)
                       ap->grad[i * cols + j] += g[j] / s - coef * x[j];
                   }
                 });
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma,
                       const Tensor& beta, double eps) {
  const auto& xn = x.node();
  const auto& gn = gamma.node();
  const auto& bn = beta.node();
  std::size_t rows = xn->rows(), cols = xn->cols();
  if (gn->rows() != 1 || gn->cols() != cols)
    throw ShapeMismatchError("layer_norm gamma", "[1," + std::to_string(cols) + "]",
                             shape_to_string(gn->shape));
  if (bn->rows() != 1 || bn->cols() != cols)
    throw ShapeMismatchError("layer_norm beta", "[1," + std::to_string(cols) + "]",
                             shape_to_string(bn->shape));
  std::vector<double> out(xn->size());
  std::vector<double> xhat(xn->size());
  std::vector<double> inv_std(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = xn->value.data() + i * cols;
    double mean = 0.0;
    for (std::size_t j = 0; j < cols; ++j) mean += row[j];
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double d = row[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    double inv = 1.0 / std::sqrt(var + eps);
    inv_std[i] = inv;
    for (std::size_t j = 0; j < cols; ++j) {
      double h = (row[j] - mean) * inv;
      xhat[i * cols + j] = h;
      out[i * cols + j] = gn->value[j] * h + bn->value[j];
    }
  }
  Node* xp = xn.get();
  Node* gp = gn.get();
  Node* bp = bn.get();
  auto xhat_ptr = std::make_shared<std::vector<double>>(std::move(xhat));
  auto inv_ptr = std::make_shared<std::vector<double>>(std::move(inv_std));
  return make_op(
      xn->shape, std::move(out), {xn, gn, bn},
      [xp, gp, bp, rows, cols, xhat_ptr, inv_ptr](Node& self) {
        const auto& xh = *xhat_ptr;
        if (bp->requires_grad) {
          bp->ensure_grad();
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
              bp->grad[j] += self.grad[i * cols + j];
        }
        if (gp->requires_grad) {
          gp->ensure_grad();
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
              gp->grad[j] += self.grad[i * cols + j] * xh[i * cols + j];
        }
        if (xp->requires_grad) {
          xp->ensure_grad();
          double dinv = 1.0 / static_cast<double>(cols);
          for (std::size_t i = 0; i < rows; ++i) {
            // dxhat = dy * gamma; dx = inv*(dxhat - mean(dxhat)
            //                              - xhat*mean(dxhat*xhat))
            double sum_dxh = 0.0, sum_dxh_xh = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
              double dxh = self.grad[i * cols + j] * gp->value[j];
              sum_dxh += dxh;
              sum_dxh_xh += dxh * xh[i * cols + j];
            }
            double inv = (*inv_ptr)[i];
            for (std::size_t j = 0; j < cols; ++j) {
              double dxh = self.grad[i * cols + j] * gp->value[j];
              xp->grad[i * cols + j] +=
                  inv * (dxh - dinv * sum_dxh -
                         xh[i * cols + j] * dinv * sum_dxh_xh);
            }
          }
        }
      });
}

Tensor bce_with_logits(const Tensor& logits, const std::vector<double>& labels,
                       double pos_weight) {
  const auto& sn = logits.node();
  std::size_t n = sn->size();
  if (sn->cols() != 1 || labels.size() != n)
    throw ShapeMismatchError("bce_with_logits",
                             "[" + std::to_string(labels.size()) + ",1]",
                             shape_to_string(sn->shape));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = sn->value[i];
    double y = labels[i];
    double w = y > 0.5 ? pos_weight : 1.0;
    // max(s,0) - s*y + log1p(exp(-|s|)) is exact and overflow-free
    total += w * (std::max(s, 0.0) - s * y + std::log1p(std::exp(-std::abs(s))));
  }
  total /= static_cast<double>(n);
  Node* sp = sn.get();
  auto yv = std::make_shared<std::vector<double>>(labels);
  return make_op({1, 1}, {total}, {sn}, [sp, yv, pos_weight, n](Node& self) {
    if (!sp->requires_grad) return;
    sp->ensure_grad();
    double g = self.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double y = (*yv)[i];
      double w = y > 0.5 ? pos_weight : 1.0;
      sp->grad[i] += g * w * (stable_sigmoid(sp->value[i]) - y);
    }
  });
}

}  // namespace vulngraph::tensor
