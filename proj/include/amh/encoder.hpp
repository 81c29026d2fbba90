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

#include <string>
#include <vector>

#include "amh/gradcheck.hpp"
#include "amh/rng.hpp"
#include "amh/tensor.hpp"

namespace amh {

/// Dense per-frame features [T, d_in], time-major. Rows at or past `length`
/// are padding and never read.
struct ModalitySequence {
  Tensor features;
  std::size_t length = 0;

  std::size_t rows() const { return features.dim(0); }
  std::size_t feature_dim() const { return features.dim(1); }
};

/// Token ids of a transcript; entries at or past `length` are padding.
struct TokenSequence {
  std::vector<std::size_t> tokens;
  std::size_t length = 0;
};

/**
 * Single-layer unidirectional GRU weights.
 *
 *   z  = sigmoid(x W_z + h U_z + b_z)
 *   r  = sigmoid(x W_r + h U_r + b_r)
 *   h~ = tanh(x W_h + (r * h) U_h + b_h)
 *   h' = (1 - z) * h + z * h~
 *
 * Input maps are [d_in, d_h], recurrent maps [d_h, d_h], biases [d_h].
 */
struct GruParams {
  Tensor w_z, w_r, w_h;
  Tensor u_z, u_r, u_h;
  Tensor b_z, b_r, b_h;

  /// Glorot-uniform matrices, zero biases.
  static GruParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
  static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return w_z.dim(0); }
  std::size_t hidden_dim() const { return w_z.dim(1); }

  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

/// Learned token embedding. The last row is reserved for out-of-vocabulary
/// words; tokenizers map them there. Ids >= vocab_size are rejected.
struct EmbeddingTable {
  Tensor table;  // [vocab_size, embed_dim]

  static EmbeddingTable init(std::size_t vocab_size, std::size_t embed_dim, Rng& rng);

  std::size_t vocab_size() const { return table.dim(0); }
  std::size_t embed_dim() const { return table.dim(1); }
  std::size_t unknown_index() const { return vocab_size() - 1; }

  Tensor lookup(Tape& tape, std::size_t token) const;
};

struct EncodedModality {
  Tensor hidden_states;  // [T, d_h]; rows >= length are zero
  Tensor last_state;     // [d_h], state after step length - 1
  std::size_t length = 0;
};

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

Tensor gru_cell(Tape& tape, const GruParams& params, const Tensor& h_prev, const Tensor& x);

EncodedModality encode(Tape& tape, const GruParams& params, const ModalitySequence& seq);
EncodedModality encode(Tape& tape, const GruParams& params, const TokenSequence& seq,
                       const EmbeddingTable& embedding);

}  // namespace amh
