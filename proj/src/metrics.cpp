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

#include "amh/metrics.hpp"

#include "amh/error.hpp"

namespace amh {

EvalReport score_predictions(std::span<const std::size_t> truth,
                             std::span<const std::size_t> predicted, std::size_t num_classes) {
  if (truth.empty()) throw DataError("evaluate: no samples");
  if (truth.size() != predicted.size()) throw DataError("evaluate: label count mismatch");
  EvalReport r;
  r.counts.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  r.support.assign(num_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes || predicted[i] >= num_classes) {
      throw DataError("evaluate: label out of range");
    }
    r.counts[truth[i]][predicted[i]] += 1;
    r.support[truth[i]] += 1;
    if (truth[i] == predicted[i]) ++correct;
  }
  r.wa = static_cast<double>(correct) / static_cast<double>(truth.size());

  r.confusion.assign(num_classes, std::vector<double>(num_classes, 0.0));
  double recall_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (r.support[c] == 0) continue;
    const double n = static_cast<double>(r.support[c]);
    for (std::size_t p = 0; p < num_classes; ++p) {
      r.confusion[c][p] = static_cast<double>(r.counts[c][p]) / n;
    }
    recall_sum += r.confusion[c][c];
    ++present;
  }
  r.ua = recall_sum / static_cast<double>(present);
  return r;
}

EvalReport evaluate(const Model& model, std::span<const MultimodalSample* const> samples) {
  if (samples.empty()) throw DataError("evaluate: no samples");
  std::vector<std::size_t> truth, predicted;
  for (const MultimodalSample* s : samples) {
    truth.push_back(s->label);
    predicted.push_back(model.predict_label(*s));
  }
  return score_predictions(truth, predicted, model.config().num_classes());
}

EvalReport evaluate(const Model& model, std::span<const MultimodalSample> samples) {
  std::vector<const MultimodalSample*> ptrs;
  for (const auto& s : samples) ptrs.push_back(&s);
  return evaluate(model, std::span<const MultimodalSample* const>(ptrs));
}

}  // namespace amh
