// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The AMH Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "amh/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "amh/error.hpp"

namespace amh {

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

// ---------------------------------------------------------------------------
// Tensor

void Tensor::Impl::ensure_grad() {
  if (grad.empty() && !data.empty()) grad.assign(data.size(), 0.0);
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto impl = std::make_shared<Impl>();
  impl->data.assign(shape_numel(shape), 0.0);
  impl->shape = std::move(shape);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (values.size() != shape_numel(shape)) {
    throw DimensionError("tensor: " + std::to_string(values.size()) +
                         " values do not fill shape " + shape_string(shape));
  }
  auto impl = std::make_shared<Impl>();
  impl->shape = std::move(shape);
  impl->data = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::vector(std::initializer_list<double> values, bool requires_grad) {
  return from({values.size()}, std::vector<double>(values), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                      bool requires_grad) {
  return from({rows, cols}, std::move(values), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({}, {value}, requires_grad);
}

Tensor::Impl& Tensor::impl() const {
  if (!impl_) throw Error("tensor: use of undefined tensor");
  return *impl_;
}

const Shape& Tensor::shape() const { return impl().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("tensor: axis " + std::to_string(axis) + " out of range for shape " +
                         shape_string(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return impl().data.size(); }
bool Tensor::requires_grad() const { return impl().requires_grad; }
std::span<const double> Tensor::data() const { return impl().data; }
std::span<double> Tensor::mutable_data() { return impl().data; }

double Tensor::item() const {
  if (numel() != 1) throw DimensionError("tensor: item() on shape " + shape_string(shape()));
  return impl().data[0];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  if (rank() != 2) throw DimensionError("tensor: at(r, c) on shape " + shape_string(shape()));
  return impl().data[row * shape()[1] + col];
}

bool Tensor::has_grad() const { return !impl().grad.empty(); }
std::span<const double> Tensor::grad() const { return impl().grad; }

std::span<double> Tensor::mutable_grad() {
  impl().ensure_grad();
  return impl().grad;
}

void Tensor::zero_grad() {
  auto& g = impl().grad;
  std::fill(g.begin(), g.end(), 0.0);
}

Tensor Tensor::clone() const {
  auto impl = std::make_shared<Impl>(this->impl());
  return Tensor(std::move(impl));
}

std::vector<double> Tensor::to_vector() const { return impl().data; }

// ---------------------------------------------------------------------------
// Tape

namespace {

void require_same_shape(const char* op, const Shape& a, const Shape& b) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
  }
}

}  // namespace

void Tape::record(const char* op, std::function<void()> backward) {
  records_.push_back({op, std::move(backward)});
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  const bool a_vec = sa.size() == 1;
  const bool b_vec = sb.size() == 1;
  const bool ok_rank = (sa.size() == 2 || a_vec) && (sb.size() == 2 || b_vec) && !(a_vec && b_vec);
  if (!ok_rank) {
    throw DimensionError("matmul: unsupported ranks " + shape_string(sa) + " x " +
                         shape_string(sb));
  }
  const std::size_t m = a_vec ? 1 : sa[0];
  const std::size_t k = a_vec ? sa[0] : sa[1];
  const std::size_t kb = sb[0];
  const std::size_t n = b_vec ? 1 : sb[1];
  if (k != kb) {
    throw DimensionError("matmul: inner extents differ " + shape_string(sa) + " x " +
                         shape_string(sb));
  }
  Shape out_shape;
  if (a_vec) out_shape = {n};
  else if (b_vec) out_shape = {m};
  else out_shape = {m, n};

  Tensor out = Tensor::zeros(out_shape, a.requires_grad() || b.requires_grad());
  const double* pa = a.impl_->data.data();
  const double* pb = b.impl_->data.data();
  double* po = out.impl_->data.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      double* orow = po + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }

  if (out.requires_grad()) {
    record("matmul", [ai = a.impl_, bi = b.impl_, oi = out.impl_, m, k, n] {
      if (oi->grad.empty()) return;
      const double* go = oi->grad.data();
      if (ai->requires_grad) {
        ai->ensure_grad();
        double* ga = ai->grad.data();
        const double* pb = bi->data.data();
        // dA = dO * B^T
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += go[i * n + j] * pb[p * n + j];
            ga[i * k + p] += acc;
          }
        }
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        double* gb = bi->grad.data();
        const double* pa = ai->data.data();
        // dB = A^T * dO
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double av = pa[i * k + p];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av * go[i * n + j];
          }
        }
      }
    });
  }
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a.shape(), b.shape());
  Tensor out = Tensor::zeros(a.shape(), a.requires_grad() || b.requires_grad());
  auto& o = out.impl_->data;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.impl_->data[i] + b.impl_->data[i];
  if (out.requires_grad()) {
    record("add", [ai = a.impl_, bi = b.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      for (auto* in : {ai.get(), bi.get()}) {
        if (!in->requires_grad) continue;
        in->ensure_grad();
        for (std::size_t i = 0; i < oi->grad.size(); ++i) in->grad[i] += oi->grad[i];
      }
    });
  }
  return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a.shape(), b.shape());
  Tensor out = Tensor::zeros(a.shape(), a.requires_grad() || b.requires_grad());
  auto& o = out.impl_->data;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.impl_->data[i] - b.impl_->data[i];
  if (out.requires_grad()) {
    record("sub", [ai = a.impl_, bi = b.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < oi->grad.size(); ++i) ai->grad[i] += oi->grad[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < oi->grad.size(); ++i) bi->grad[i] -= oi->grad[i];
      }
    });
  }
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a.shape(), b.shape());
  Tensor out = Tensor::zeros(a.shape(), a.requires_grad() || b.requires_grad());
  auto& o = out.impl_->data;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.impl_->data[i] * b.impl_->data[i];
  if (out.requires_grad()) {
    record("mul", [ai = a.impl_, bi = b.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < oi->grad.size(); ++i)
          ai->grad[i] += oi->grad[i] * bi->data[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < oi->grad.size(); ++i)
          bi->grad[i] += oi->grad[i] * ai->data[i];
      }
    });
  }
  return out;
}

Tensor Tape::scale(const Tensor& a, double factor) {
  Tensor out = Tensor::zeros(a.shape(), a.requires_grad());
  auto& o = out.impl_->data;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = factor * a.impl_->data[i];
  if (out.requires_grad()) {
    record("scale", [ai = a.impl_, oi = out.impl_, factor] {
      if (oi->grad.empty()) return;
      ai->ensure_grad();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) ai->grad[i] += factor * oi->grad[i];
    });
  }
  return out;
}

Tensor Tape::sigmoid(const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape(), a.requires_grad());
  auto& o = out.impl_->data;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double x = a.impl_->data[i];
    // Split by sign so exp never overflows.
    if (x >= 0) {
      o[i] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      o[i] = e / (1.0 + e);
    }
  }
  if (out.requires_grad()) {
    record("sigmoid", [ai = a.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      ai->ensure_grad();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) {
        const double y = oi->data[i];
        ai->grad[i] += oi->grad[i] * y * (1.0 - y);
      }
    });
  }
  return out;
}

Tensor Tape::tanh(const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape(), a.requires_grad());
  auto& o = out.impl_->data;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::tanh(a.impl_->data[i]);
  if (out.requires_grad()) {
    record("tanh", [ai = a.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      ai->ensure_grad();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) {
        const double y = oi->data[i];
        ai->grad[i] += oi->grad[i] * (1.0 - y * y);
      }
    });
  }
  return out;
}

Tensor Tape::softmax(const Tensor& x, std::span<const bool> mask) {
  if (x.rank() != 1) throw DimensionError("softmax: expected rank-1 input, got " +
                                          shape_string(x.shape()));
  const std::size_t n = x.numel();
  if (!mask.empty() && mask.size() != n) {
    throw DimensionError("softmax: mask length " + std::to_string(mask.size()) +
                         " does not match input " + shape_string(x.shape()));
  }
  std::vector<bool> valid(n, true);
  if (!mask.empty()) valid.assign(mask.begin(), mask.end());
  const auto& xs = x.impl_->data;

  double max_v = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    any = true;
    max_v = std::max(max_v, xs[i]);
  }
  if (!any) throw InvalidMaskError("softmax: every position is masked");

  Tensor out = Tensor::zeros({n}, x.requires_grad());
  auto& o = out.impl_->data;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    o[i] = std::exp(xs[i] - max_v);
    total += o[i];
  }
  for (std::size_t i = 0; i < n; ++i) o[i] /= total;

  if (out.requires_grad()) {
    record("softmax", [xi = x.impl_, oi = out.impl_, valid = std::move(valid)] {
      if (oi->grad.empty()) return;
      xi->ensure_grad();
      const auto& y = oi->data;
      const auto& gy = oi->grad;
      double dot = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) dot += y[i] * gy[i];
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (valid[i]) xi->grad[i] += y[i] * (gy[i] - dot);
      }
    });
  }
  return out;
}

Tensor Tape::cross_entropy(const Tensor& logits, std::span<const std::size_t> labels) {
  if (logits.rank() != 2) {
    throw DimensionError("cross_entropy: expected [batch, classes] logits, got " +
                         shape_string(logits.shape()));
  }
  const std::size_t batch = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  if (labels.size() != batch) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) +
                         " labels for logits " + shape_string(logits.shape()));
  }
  for (auto y : labels) {
    if (y >= classes) {
      throw DimensionError("cross_entropy: label " + std::to_string(y) + " out of range for " +
                           std::to_string(classes) + " classes");
    }
  }
  const auto& z = logits.impl_->data;
  std::vector<double> probs(batch * classes);
  double loss = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = z.data() + b * classes;
    const double mx = *std::max_element(row, row + classes);
    double s = 0.0;
    for (std::size_t c = 0; c < classes; ++c) s += std::exp(row[c] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t c = 0; c < classes; ++c) probs[b * classes + c] = std::exp(row[c] - lse);
    loss += lse - row[labels[b]];
  }
  loss /= static_cast<double>(batch);

  Tensor out = Tensor::scalar(loss, logits.requires_grad());
  if (out.requires_grad()) {
    std::vector<std::size_t> ys(labels.begin(), labels.end());
    record("cross_entropy", [li = logits.impl_, oi = out.impl_, probs = std::move(probs),
                             ys = std::move(ys), batch, classes] {
      if (oi->grad.empty()) return;
      li->ensure_grad();
      const double g = oi->grad[0] / static_cast<double>(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < classes; ++c) {
          const double target = (c == ys[b]) ? 1.0 : 0.0;
          li->grad[b * classes + c] += g * (probs[b * classes + c] - target);
        }
      }
    });
  }
  return out;
}

Tensor Tape::concat(std::initializer_list<Tensor> parts, std::size_t axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor Tape::concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const Shape& ref = parts[0].shape();
  if (axis >= ref.size()) {
    throw DimensionError("concat: axis " + std::to_string(axis) + " out of range for " +
                         shape_string(ref));
  }
  Shape out_shape = ref;
  out_shape[axis] = 0;
  bool needs_grad = false;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool compatible = s.size() == ref.size();
    for (std::size_t d = 0; compatible && d < s.size(); ++d) {
      if (d != axis && s[d] != ref[d]) compatible = false;
    }
    if (!compatible) {
      throw DimensionError("concat: incompatible shapes " + shape_string(ref) + " and " +
                           shape_string(s) + " along axis " + std::to_string(axis));
    }
    out_shape[axis] += s[axis];
    needs_grad = needs_grad || p.requires_grad();
  }

  std::size_t outer = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= ref[d];
  std::size_t inner = 1;
  for (std::size_t d = axis + 1; d < ref.size(); ++d) inner *= ref[d];
  const std::size_t out_stride = out_shape[axis] * inner;

  Tensor out = Tensor::zeros(out_shape, needs_grad);
  auto& o = out.impl_->data;
  std::vector<std::shared_ptr<Tensor::Impl>> impls;
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t block = p.shape()[axis] * inner;
    const auto& src = p.impl_->data;
    for (std::size_t r = 0; r < outer; ++r) {
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r * block), block,
                  o.begin() + static_cast<std::ptrdiff_t>(r * out_stride + offset));
    }
    impls.push_back(p.impl_);
    offsets.push_back(offset);
    offset += block;
  }

  if (needs_grad) {
    record("concat", [impls = std::move(impls), offsets = std::move(offsets),
                      oi = out.impl_, outer, out_stride] {
      if (oi->grad.empty()) return;
      for (std::size_t k = 0; k < impls.size(); ++k) {
        auto& in = *impls[k];
        if (!in.requires_grad || in.data.empty()) continue;
        in.ensure_grad();
        const std::size_t block = in.data.size() / outer;
        for (std::size_t r = 0; r < outer; ++r) {
          for (std::size_t j = 0; j < block; ++j) {
            in.grad[r * block + j] += oi->grad[r * out_stride + offsets[k] + j];
          }
        }
      }
    });
  }
  return out;
}

Tensor Tape::stack(std::span<const Tensor> rows) {
  if (rows.empty()) throw DimensionError("stack: no inputs");
  const Shape& ref = rows[0].shape();
  if (ref.size() != 1) throw DimensionError("stack: expected rank-1 rows, got " + shape_string(ref));
  for (const auto& r : rows) {
    if (r.shape() != ref) {
      throw DimensionError("stack: row shape " + shape_string(r.shape()) + " differs from " +
                           shape_string(ref));
    }
  }
  const std::size_t d = ref[0];
  bool needs_grad = false;
  for (const auto& r : rows) needs_grad = needs_grad || r.requires_grad();
  Tensor out = Tensor::zeros({rows.size(), d}, needs_grad);
  auto& o = out.impl_->data;
  std::vector<std::shared_ptr<Tensor::Impl>> impls;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].impl_->data.begin(), rows[i].impl_->data.end(),
              o.begin() + static_cast<std::ptrdiff_t>(i * d));
    impls.push_back(rows[i].impl_);
  }
  if (needs_grad) {
    record("stack", [impls = std::move(impls), oi = out.impl_, d] {
      if (oi->grad.empty()) return;
      for (std::size_t i = 0; i < impls.size(); ++i) {
        auto& in = *impls[i];
        if (!in.requires_grad) continue;
        in.ensure_grad();
        for (std::size_t j = 0; j < d; ++j) in.grad[j] += oi->grad[i * d + j];
      }
    });
  }
  return out;
}

Tensor Tape::row(const Tensor& matrix, std::size_t index) {
  if (matrix.rank() != 2) {
    throw DimensionError("row: expected a matrix, got " + shape_string(matrix.shape()));
  }
  const std::size_t rows = matrix.dim(0);
  const std::size_t d = matrix.dim(1);
  if (index >= rows) {
    throw DimensionError("row: index " + std::to_string(index) + " out of range for " +
                         shape_string(matrix.shape()));
  }
  const auto& src = matrix.impl_->data;
  std::vector<double> values(src.begin() + static_cast<std::ptrdiff_t>(index * d),
                             src.begin() + static_cast<std::ptrdiff_t>((index + 1) * d));
  Tensor out = Tensor::from({d}, std::move(values), matrix.requires_grad());
  if (out.requires_grad()) {
    record("row", [mi = matrix.impl_, oi = out.impl_, index, d] {
      if (oi->grad.empty()) return;
      mi->ensure_grad();
      for (std::size_t j = 0; j < d; ++j) mi->grad[index * d + j] += oi->grad[j];
    });
  }
  return out;
}

Tensor Tape::sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.impl_->data) s += v;
  Tensor out = Tensor::scalar(s, a.requires_grad());
  if (out.requires_grad()) {
    record("sum", [ai = a.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      ai->ensure_grad();
      for (auto& g : ai->grad) g += oi->grad[0];
    });
  }
  return out;
}

Tensor Tape::negate_grad(const Tensor& a) {
  Tensor out = Tensor::from(a.shape(), a.impl_->data, a.requires_grad());
  if (out.requires_grad()) {
    record("negate_grad", [ai = a.impl_, oi = out.impl_] {
      if (oi->grad.empty()) return;
      ai->ensure_grad();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) ai->grad[i] -= oi->grad[i];
    });
  }
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw DimensionError("backward: loss must be a scalar, got shape " +
                         shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;
  loss.impl_->ensure_grad();
  loss.impl_->grad[0] += 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) it->backward();
}

}  // namespace amh
