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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "amh/tensor.hpp"

namespace amh {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct GradCheckEntry {
  std::string name;
  std::size_t size = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;

  bool passed() const;
  double max_rel_error() const;
  std::vector<std::string> failing() const;
};

/// Lower bound on the denominator of the relative error, so coordinates
/// whose true gradient is ~0 are judged on absolute error instead.
inline constexpr double kGradCheckFloor = 1e-6;

/// |analytic - numeric| / max(|analytic|, |numeric|, kGradCheckFloor)
double grad_relative_error(double analytic, double numeric);

/**
 * Compares taped gradients of `loss_fn` against central differences
 * (f(p + eps) - f(p - eps)) / (2 eps), element by element, for every tensor
 * in `params`. `loss_fn` must rebuild its computation on the tape it is
 * given and return a scalar. Parameter values are restored afterwards and
 * their grad slots are left zeroed.
 */
GradCheckReport grad_check(const std::function<Tensor(Tape&)>& loss_fn,
                           std::span<const NamedTensor> params, double epsilon = 1e-5,
                           double tolerance = 1e-4);

}  // namespace amh
