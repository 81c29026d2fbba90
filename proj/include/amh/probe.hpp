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

#include <cstdint>
#include <span>
#include <vector>

#include "amh/hopping.hpp"
#include "amh/metrics.hpp"
#include "amh/sample.hpp"

namespace amh {

// Linear probes: multinomial logistic regression on the raw leading frames
// of a subset of modalities. Used to measure how much label information a
// modality (or pair) carries on its own.

struct ProbeConfig {
  /// Leading time steps used per modality (shorter sequences zero-pad).
  std::size_t steps = 4;
  /// Token one-hot width for the text modality.
  std::size_t vocab_size = 16;
  std::size_t epochs = 300;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

std::vector<double> probe_features(const MultimodalSample& sample,
                                   std::span<const Modality> modalities,
                                   const ProbeConfig& config);

/// Trains on `train` (full-batch Adam) and reports metrics on `test`.
EvalReport train_probe(std::span<const MultimodalSample> train,
                       std::span<const MultimodalSample> test,
                       std::span<const Modality> modalities, std::size_t num_classes,
                       const ProbeConfig& config);

}  // namespace amh
