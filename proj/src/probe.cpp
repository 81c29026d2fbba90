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

#include "amh/probe.hpp"

#include <algorithm>

#include "amh/encoder.hpp"
#include "amh/error.hpp"
#include "amh/gradcheck.hpp"
#include "amh/optimizer.hpp"
#include "amh/rng.hpp"

namespace amh {

namespace {

void append_dense(const ModalitySequence& seq, std::size_t steps, std::vector<double>& out) {
  const std::size_t d = seq.feature_dim();
  const auto data = seq.features.data();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t j = 0; j < d; ++j) out.push_back(t < seq.length ? data[t * d + j] : 0.0);
  }
}

Tensor design_matrix(std::span<const MultimodalSample> samples,
                     std::span<const Modality> modalities, const ProbeConfig& config) {
  std::vector<double> values;
  std::size_t width = 0;
  for (const auto& s : samples) {
    auto row = probe_features(s, modalities, config);
    row.push_back(1.0);  // bias column
    if (width == 0) width = row.size();
    if (row.size() != width) throw DimensionError("probe: inconsistent feature widths");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor::matrix(samples.size(), width, std::move(values));
}

}  // namespace

std::vector<double> probe_features(const MultimodalSample& sample,
                                   std::span<const Modality> modalities,
                                   const ProbeConfig& config) {
  std::vector<double> out;
  for (Modality m : modalities) {
    switch (m) {
      case Modality::Audio: append_dense(sample.audio, config.steps, out); break;
      case Modality::Video: append_dense(sample.video, config.steps, out); break;
      case Modality::Text:
        for (std::size_t t = 0; t < config.steps; ++t) {
          const std::size_t base = out.size();
          out.resize(base + config.vocab_size, 0.0);
          if (t < sample.text.length) {
            const std::size_t tok = sample.text.tokens[t];
            if (tok >= config.vocab_size) throw DataError("probe: token id exceeds vocab size");
            out[base + tok] = 1.0;
          }
        }
        break;
    }
  }
  return out;
}

EvalReport train_probe(std::span<const MultimodalSample> train,
                       std::span<const MultimodalSample> test,
                       std::span<const Modality> modalities, std::size_t num_classes,
                       const ProbeConfig& config) {
  if (train.empty() || test.empty()) throw DataError("probe: empty sample set");
  const Tensor x_train = design_matrix(train, modalities, config);
  std::vector<std::size_t> y_train;
  for (const auto& s : train) y_train.push_back(s.label);

  Rng rng(config.seed);
  std::vector<NamedTensor> params = {
      {"probe.W", glorot_uniform(x_train.dim(1), num_classes, rng)}};
  Adam adam(params, AdamOptions{.learning_rate = config.learning_rate});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Tape tape;
    Tensor loss = tape.cross_entropy(tape.matmul(x_train, params[0].tensor), y_train);
    tape.backward(loss);
    adam.step(params);
  }

  const Tensor x_test = design_matrix(test, modalities, config);
  Tape tape;
  const Tensor logits = tape.matmul(x_test, params[0].tensor);
  std::vector<std::size_t> truth, predicted;
  for (std::size_t i = 0; i < test.size(); ++i) {
    truth.push_back(test[i].label);
    const auto row = logits.data().subspan(i * num_classes, num_classes);
    predicted.push_back(
        static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return score_predictions(truth, predicted, num_classes);
}

}  // namespace amh
