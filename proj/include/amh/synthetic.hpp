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

// Synthetic three-modality classification corpora.
//
// Every sample draws one latent code per modality, c_A, c_T, c_V in
// [0, C). Every frame of modality m carries c_m:
//
//   audio / video: row P_m[c_m] + sigma * N(0, I), where P_m is a fixed
//                  random [C, d_m] projection with N(0, 1) entries
//   text:          clean token c_m * S + s, with s a uniformly drawn synonym
//                  among S = vocab / C. The emitted token is the one whose
//                  prototype (fixed N(0, I) vectors, one per vocab entry) is
//                  nearest to the clean token's prototype + sigma * N(0, I)
//
// Rules:
//   copy: c_A = c_T = c_V = label. Any single modality determines the label.
//   xor3: c_A, c_T, c_V independent uniform, label = (c_A + c_T + c_V) mod C.
//         Every single modality and every pair is independent of the label.
//
// With sigma <= kSyntheticSigmaThreshold frames are decodable almost surely
// (projection rows are ~sqrt(2 d) apart against noise of norm ~sigma sqrt(d)),
// so the Bayes-optimal accuracy is ~1.0 for both rules.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amh/sample.hpp"

namespace amh {

enum class SyntheticRule { Copy, Xor3 };

const char* rule_name(SyntheticRule rule);
SyntheticRule rule_from_name(const std::string& name);

inline constexpr double kSyntheticSigmaThreshold = 0.3;

struct SyntheticSpec {
  std::size_t n_samples = 600;
  std::size_t min_length = 4;
  std::size_t max_length = 8;
  std::size_t audio_dim = 8;
  std::size_t video_dim = 8;
  std::size_t vocab_size = 16;
  std::size_t num_classes = 4;
  double noise = 0.1;
  SyntheticRule rule = SyntheticRule::Xor3;
  std::uint64_t seed = 0;
  /// Prefix for sample ids; ids are <prefix><index>, zero padded.
  std::string id_prefix = "s";

  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

std::vector<MultimodalSample> generate_synthetic(const SyntheticSpec& spec);

/// Per-modality latent codes of one sample.
struct LatentCodes {
  std::size_t audio = 0, text = 0, video = 0;
};

/// Latent codes drawn for each sample of `spec`, in generation order.
std::vector<LatentCodes> synthetic_codes(const SyntheticSpec& spec);

}  // namespace amh
