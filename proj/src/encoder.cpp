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

#include "amh/encoder.hpp"

#include <cmath>

#include "amh/error.hpp"

namespace amh {

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> values(fan_in * fan_out);
  for (auto& v : values) v = rng.uniform(-a, a);
  return Tensor::matrix(fan_in, fan_out, std::move(values), true);
}

GruParams GruParams::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  GruParams p;
  p.w_z = glorot_uniform(input_dim, hidden_dim, rng);
  p.w_r = glorot_uniform(input_dim, hidden_dim, rng);
  p.w_h = glorot_uniform(input_dim, hidden_dim, rng);
  p.u_z = glorot_uniform(hidden_dim, hidden_dim, rng);
  p.u_r = glorot_uniform(hidden_dim, hidden_dim, rng);
  p.u_h = glorot_uniform(hidden_dim, hidden_dim, rng);
  p.b_z = Tensor::zeros({hidden_dim}, true);
  p.b_r = Tensor::zeros({hidden_dim}, true);
  p.b_h = Tensor::zeros({hidden_dim}, true);
  return p;
}

GruParams GruParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  for (Tensor* w : {&p.w_z, &p.w_r, &p.w_h}) *w = Tensor::zeros({input_dim, hidden_dim}, true);
  for (Tensor* u : {&p.u_z, &p.u_r, &p.u_h}) *u = Tensor::zeros({hidden_dim, hidden_dim}, true);
  for (Tensor* b : {&p.b_z, &p.b_r, &p.b_h}) *b = Tensor::zeros({hidden_dim}, true);
  return p;
}

void GruParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".w_z", w_z});
  out.push_back({prefix + ".w_r", w_r});
  out.push_back({prefix + ".w_h", w_h});
  out.push_back({prefix + ".u_z", u_z});
  out.push_back({prefix + ".u_r", u_r});
  out.push_back({prefix + ".u_h", u_h});
  out.push_back({prefix + ".b_z", b_z});
  out.push_back({prefix + ".b_r", b_r});
  out.push_back({prefix + ".b_h", b_h});
}

EmbeddingTable EmbeddingTable::init(std::size_t vocab_size, std::size_t embed_dim, Rng& rng) {
  if (vocab_size < 1 || embed_dim < 1) throw ConfigError("embedding: empty table");
  return {glorot_uniform(vocab_size, embed_dim, rng)};
}

Tensor EmbeddingTable::lookup(Tape& tape, std::size_t token) const {
  if (token >= vocab_size()) {
    throw DataError("embedding: token id " + std::to_string(token) +
                    " out of vocabulary range (vocab size " + std::to_string(vocab_size()) + ")");
  }
  return tape.row(table, token);
}

Tensor gru_cell(Tape& tape, const GruParams& p, const Tensor& h_prev, const Tensor& x) {
  if (x.rank() != 1 || x.dim(0) != p.input_dim()) {
    throw DimensionError("gru_cell: input " + shape_string(x.shape()) + " does not match d_in " +
                         std::to_string(p.input_dim()));
  }
  if (h_prev.rank() != 1 || h_prev.dim(0) != p.hidden_dim()) {
    throw DimensionError("gru_cell: state " + shape_string(h_prev.shape()) +
                         " does not match d_h " + std::to_string(p.hidden_dim()));
  }
  Tensor z = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, p.w_z), tape.matmul(h_prev, p.u_z)), p.b_z));
  Tensor r = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, p.w_r), tape.matmul(h_prev, p.u_r)), p.b_r));
  Tensor candidate = tape.tanh(tape.add(
      tape.add(tape.matmul(x, p.w_h), tape.matmul(tape.mul(r, h_prev), p.u_h)), p.b_h));
  // (1 - z) * h + z * h~  ==  h + z * (h~ - h)
  return tape.add(h_prev, tape.mul(z, tape.sub(candidate, h_prev)));
}

namespace {

template <typename InputAt>
EncodedModality run_gru(Tape& tape, const GruParams& params, std::size_t rows,
                        std::size_t length, InputAt input_at) {
  if (length == 0) throw DataError("encode: zero-length sequence");
  if (length > rows) {
    throw DataError("encode: length " + std::to_string(length) + " exceeds " +
                    std::to_string(rows) + " rows");
  }
  const std::size_t d_h = params.hidden_dim();
  Tensor h = Tensor::zeros({d_h});
  std::vector<Tensor> states;
  states.reserve(rows);
  for (std::size_t t = 0; t < length; ++t) {
    h = gru_cell(tape, params, h, input_at(t));
    states.push_back(h);
  }
  const Tensor padding = Tensor::zeros({d_h});
  while (states.size() < rows) states.push_back(padding);
  return {tape.stack(states), h, length};
}

}  // namespace

EncodedModality encode(Tape& tape, const GruParams& params, const ModalitySequence& seq) {
  if (seq.features.rank() != 2 || seq.feature_dim() != params.input_dim()) {
    throw DimensionError("encode: features " + shape_string(seq.features.shape()) +
                         " do not match d_in " + std::to_string(params.input_dim()));
  }
  return run_gru(tape, params, seq.rows(), seq.length,
                 [&](std::size_t t) { return tape.row(seq.features, t); });
}

EncodedModality encode(Tape& tape, const GruParams& params, const TokenSequence& seq,
                       const EmbeddingTable& embedding) {
  if (embedding.embed_dim() != params.input_dim()) {
    throw DimensionError("encode: embedding dim " + std::to_string(embedding.embed_dim()) +
                         " does not match d_in " + std::to_string(params.input_dim()));
  }
  return run_gru(tape, params, seq.tokens.size(), seq.length,
                 [&](std::size_t t) { return embedding.lookup(tape, seq.tokens[t]); });
}

}  // namespace amh
