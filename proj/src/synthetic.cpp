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

#include "amh/synthetic.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <cstdio>

#include "amh/error.hpp"
#include "amh/rng.hpp"

namespace amh {

namespace {

// Stream ids for derive_seed.
constexpr std::uint64_t kProjectionStream = 1;
constexpr std::uint64_t kCodeStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kTokenStream = 4;

constexpr std::size_t kTokenPrototypeDim = 8;

std::vector<double> projection(std::size_t classes, std::size_t dim, Rng& rng) {
  std::vector<double> p(classes * dim);
  for (auto& v : p) v = rng.normal();
  return p;
}

Tensor dense_frames(const std::vector<double>& proj, std::size_t dim, std::size_t code,
                    std::size_t length, double noise, Rng& rng) {
  std::vector<double> values(length * dim);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t j = 0; j < dim; ++j) {
      values[t * dim + j] = proj[code * dim + j] + noise * rng.normal();
    }
  }
  return Tensor::matrix(length, dim, std::move(values));
}

// Index of the prototype row nearest to `point`.
std::size_t nearest_row(const std::vector<double>& rows, std::span<const double> point) {
  const std::size_t dim = point.size();
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t r = 0; r * dim < rows.size(); ++r) {
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = rows[r * dim + j] - point[j];
      d += diff * diff;
    }
    if (r == 0 || d < best_d) {
      best = r;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

const char* rule_name(SyntheticRule rule) { return rule == SyntheticRule::Copy ? "copy" : "xor3"; }

SyntheticRule rule_from_name(const std::string& name) {
  if (name == "copy") return SyntheticRule::Copy;
  if (name == "xor3") return SyntheticRule::Xor3;
  throw ConfigError("unknown synthetic rule '" + name + "' (expected copy or xor3)");
}

void SyntheticSpec::validate() const {
  if (n_samples < 1) throw ConfigError("synthetic: n must be >= 1");
  if (num_classes < 2) throw ConfigError("synthetic: need at least 2 classes");
  if (min_length < 1 || max_length < min_length) {
    throw ConfigError("synthetic: invalid length range");
  }
  if (audio_dim < 1 || video_dim < 1) throw ConfigError("synthetic: feature dims must be >= 1");
  if (vocab_size < num_classes) throw ConfigError("synthetic: vocab must be >= class count");
  if (!(noise >= 0.0)) throw ConfigError("synthetic: noise must be >= 0");
}

std::vector<LatentCodes> synthetic_codes(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, kCodeStream));
  const std::size_t c = spec.num_classes;
  std::vector<LatentCodes> codes(spec.n_samples);
  for (auto& code : codes) {
    const std::size_t label = rng.below(c);
    if (spec.rule == SyntheticRule::Copy) {
      code = {label, label, label};
    } else {
      code.audio = rng.below(c);
      code.text = rng.below(c);
      // Chosen so the three codes sum to the label; marginally uniform and
      // independent of any one or two of the others.
      code.video = (label + 2 * c - code.audio - code.text) % c;
    }
  }
  return codes;
}

std::vector<MultimodalSample> generate_synthetic(const SyntheticSpec& spec) {
  const auto codes = synthetic_codes(spec);
  const std::size_t c = spec.num_classes;

  Rng proj_rng(derive_seed(spec.seed, kProjectionStream));
  const auto audio_proj = projection(c, spec.audio_dim, proj_rng);
  const auto video_proj = projection(c, spec.video_dim, proj_rng);
  const std::size_t synonyms = spec.vocab_size / c;
  Rng token_rng(derive_seed(spec.seed, kTokenStream));
  const auto token_proto = projection(spec.vocab_size, kTokenPrototypeDim, token_rng);

  const int width = static_cast<int>(std::to_string(spec.n_samples - 1).size());
  std::vector<MultimodalSample> samples;
  samples.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    Rng rng(derive_seed(spec.seed, kSampleStream, i));
    const auto& code = codes[i];
    MultimodalSample s;
    char id[64];
    std::snprintf(id, sizeof(id), "%0*zu", width, i);
    s.id = spec.id_prefix + id;
    s.label = spec.rule == SyntheticRule::Copy ? code.audio
                                               : (code.audio + code.text + code.video) % c;

    auto draw_length = [&] {
      return spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
    };
    const std::size_t len_a = draw_length();
    const std::size_t len_t = draw_length();
    const std::size_t len_v = draw_length();

    s.audio = {dense_frames(audio_proj, spec.audio_dim, code.audio, len_a, spec.noise, rng),
               len_a};
    s.text.length = len_t;
    for (std::size_t t = 0; t < len_t; ++t) {
      const std::size_t clean = code.text * synonyms + rng.below(synonyms);
      std::array<double, kTokenPrototypeDim> point{};
      for (std::size_t j = 0; j < kTokenPrototypeDim; ++j) {
        point[j] = token_proto[clean * kTokenPrototypeDim + j] + spec.noise * rng.normal();
      }
      s.text.tokens.push_back(spec.noise == 0.0 ? clean : nearest_row(token_proto, point));
    }
    s.video = {dense_frames(video_proj, spec.video_dim, code.video, len_v, spec.noise, rng),
               len_v};
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace amh
