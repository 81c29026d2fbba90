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

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace amh {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/**
 * Dense row-major float64 array with an optional gradient slot.
 *
 * A Tensor is a shared handle: copies alias the same storage. Values are
 * treated as immutable once an operation has produced them; only leaf
 * parameters are mutated in place (by the optimizer or a gradient check).
 * Rank-0 tensors (empty shape) are scalars holding one element.
 */
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor vector(std::initializer_list<double> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;
  bool requires_grad() const;

  std::span<const double> data() const;
  std::span<double> mutable_data();
  double item() const;
  double operator[](std::size_t i) const { return data()[i]; }
  double at(std::size_t row, std::size_t col) const;

  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  /// Deep copy of values (and grad slot state); the copy is a fresh leaf.
  Tensor clone() const;
  std::vector<double> to_vector() const;

 private:
  struct Impl {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;

    void ensure_grad();
  };

  explicit Tensor(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  Impl& impl() const;

  std::shared_ptr<Impl> impl_;

  friend class Tape;
};

/**
 * Record-on-execute computation tape.
 *
 * Every differentiable operation is a member: it computes its output eagerly
 * and, when any input requires a gradient, appends a backward closure.
 * backward() replays the closures in exact reverse execution order and
 * accumulates into grad slots. A tape and the tensors it creates belong to a
 * single thread.
 */
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Supports [m,k]x[k,n], [k]x[k,n] -> [n] and [m,k]x[k] -> [m].
  Tensor matmul(const Tensor& a, const Tensor& b);

  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& a, double factor);
  Tensor sigmoid(const Tensor& a);
  Tensor tanh(const Tensor& a);

  /// Softmax over a rank-1 tensor. Masked positions (mask[i] == false) get
  /// exactly zero weight; an empty mask means every position is valid.
  Tensor softmax(const Tensor& x, std::span<const bool> mask = {});

  /// Mean negative log-likelihood of integer labels under row-wise softmax of
  /// logits [batch, classes]; computed with log-sum-exp.
  Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels);

  Tensor concat(std::span<const Tensor> parts, std::size_t axis = 0);
  Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis = 0);

  /// Stacks equally shaped rank-1 tensors into a [n, d] matrix.
  Tensor stack(std::span<const Tensor> rows);

  /// Row `index` of a matrix as a rank-1 tensor.
  Tensor row(const Tensor& matrix, std::size_t index);

  Tensor sum(const Tensor& a);

  /// Identity forward, negated gradient backward. Used only to inject a
  /// known gradient fault when exercising the gradient checker.
  Tensor negate_grad(const Tensor& a);

  /// Seeds d(loss)/d(loss) = 1 and replays the tape backward.
  void backward(const Tensor& loss);

  std::size_t size() const { return records_.size(); }
  void clear() { records_.clear(); }

 private:
  struct Record {
    const char* op;
    std::function<void()> backward;
  };

  void record(const char* op, std::function<void()> backward);

  std::vector<Record> records_;
};

}  // namespace amh
