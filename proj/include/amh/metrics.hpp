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

#include "amh/model.hpp"

namespace amh {

/**
 * Classification quality on one sample set.
 *
 * WA (weighted accuracy) is the overall fraction correct. UA (unweighted
 * accuracy) is the mean per-class recall over classes with nonzero support.
 * `confusion[c][p]` is the fraction of true-class-c samples predicted as p;
 * rows of classes without support are all zero.
 */
struct EvalReport {
  double wa = 0.0;
  double ua = 0.0;
  std::vector<std::vector<double>> confusion;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> support;
  std::size_t fold = 0;
};

/// Metrics from parallel vectors of true and predicted labels.
EvalReport score_predictions(std::span<const std::size_t> truth,
                             std::span<const std::size_t> predicted, std::size_t num_classes);

/// Argmax predictions of `model` on `samples`. Throws DataError when empty.
EvalReport evaluate(const Model& model, std::span<const MultimodalSample* const> samples);
EvalReport evaluate(const Model& model, std::span<const MultimodalSample> samples);

}  // namespace amh
