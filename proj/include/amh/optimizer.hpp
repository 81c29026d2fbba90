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

#include <span>
#include <vector>

#include "amh/gradcheck.hpp"

namespace amh {

/// Global L2 norm over every gradient slot (missing slots count as zero).
double global_grad_norm(std::span<const NamedTensor> params);

/// Rescales all gradients by max_norm / norm when the global norm exceeds
/// max_norm. Returns the factor applied (1 when unchanged).
double clip_gradients(std::span<const NamedTensor> params, double max_norm = 1.0);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam. Moment buffers mirror the parameter list given at
/// construction; step() must always be called with that same list.
class Adam {
 public:
  Adam(std::span<const NamedTensor> params, AdamOptions options = {});

  /// One update from the current gradients, which are zeroed afterwards.
  void step(std::span<const NamedTensor> params);

  std::size_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
};

}  // namespace amh
