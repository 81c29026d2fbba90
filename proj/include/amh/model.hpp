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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amh/encoder.hpp"
#include "amh/gradcheck.hpp"
#include "amh/hopping.hpp"
#include "amh/sample.hpp"
#include "amh/tensor.hpp"

namespace amh {

enum class ModelKind { Amh, Mdre };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::Amh;
  int n_hops = 3;
  std::size_t hidden_dim = 200;
  std::size_t embed_dim = 100;
  std::size_t vocab_size = 10000;
  std::size_t audio_dim = 120;
  std::size_t video_dim = 2048;
  AttentionSharing sharing = AttentionSharing::PerTarget;
  LabelSet labels = LabelSet::emotions();

  std::size_t num_classes() const { return labels.size(); }
  /// Throws ConfigError on the first inconsistent field.
  void validate() const;
};

/// Affine output layer: logits = x W + b.
struct ClassifierParams {
  Tensor weight;  // [in, C]
  Tensor bias;    // [C]

  static ClassifierParams init(std::size_t in_dim, std::size_t classes, Rng& rng);
};

/// Concat-fusion baseline's hidden layer: tanh(x W + b).
struct DenseParams {
  Tensor weight;  // [3 d_h, d_h]
  Tensor bias;    // [d_h]
};

Tensor head_logits(Tape& tape, const Tensor& features, const ClassifierParams& head);

/// Softmax probabilities of the output layer.
Tensor classify(Tape& tape, const Tensor& fused, const ClassifierParams& head);

struct ForwardResult {
  Tensor logits;  // [C]
  Tensor probs;   // [C]
  Tensor fused;   // input of the output layer's fusion stage, [3 d_h]
  std::vector<HopTrace> trace;
};

class Model {
 public:
  static Model init(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  /// Every learnable tensor, in a fixed order with stable names.
  std::vector<NamedTensor> parameters() const;

  ForwardResult forward(Tape& tape, const MultimodalSample& sample) const;

  /// Mean cross-entropy over `batch`.
  Tensor loss(Tape& tape, std::span<const MultimodalSample* const> batch) const;
  Tensor loss(Tape& tape, std::span<const MultimodalSample> batch) const;

  /// Probabilities without recording gradients.
  std::vector<double> predict(const MultimodalSample& sample) const;
  std::size_t predict_label(const MultimodalSample& sample) const;

  /// Deep copy with independent storage.
  Model clone() const;
  /// Overwrites parameter values with those of a same-shaped model.
  void assign_from(const Model& other);

  GruParams audio_encoder;
  GruParams text_encoder;
  GruParams video_encoder;
  EmbeddingTable embedding;
  std::optional<AttentionParams> attention;  // AMH only
  std::optional<DenseParams> fusion_dense;   // concat-fusion baseline only
  ClassifierParams head;

 private:
  ModelConfig config_;
};

ForwardResult forward_amh(Tape& tape, const MultimodalSample& sample, const Model& model);
ForwardResult forward_mdre(Tape& tape, const MultimodalSample& sample, const Model& model);

/// Binary checkpoint: "AMH1", a length-prefixed key=value config block, then
/// a tensor count and per tensor (name length, name, rank, extents,
/// little-endian float64 payload). Integers are little-endian; lengths and
/// counts are u32, extents u64.
void save_checkpoint(const std::string& path, const Model& model);
Model load_checkpoint(const std::string& path);

std::string config_block(const ModelConfig& config);
ModelConfig parse_config_block(const std::string& text);

}  // namespace amh
