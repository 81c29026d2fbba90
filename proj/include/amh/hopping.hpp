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

// Attentive modality hopping.
//
// Each hop re-summarizes one target modality by bilinear attention over its
// encoder hidden states, using the concatenated current summaries of the
// other two modalities as the query:
//
//   C       = [u; v]
//   score_i = C^T W h_i          (i < length)
//   a       = softmax(score)
//   H       = sum_i a_i h_i
//
// Targets cycle video, audio, text, video, ... and the query pairs are
// (audio, text) for video, (text, video) for audio and (audio, video) for
// text. Hidden-state sequences are never overwritten; only the per-modality
// summaries change. After the last hop the three summaries are concatenated
// in audio; text; video order.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "amh/encoder.hpp"
#include "amh/gradcheck.hpp"
#include "amh/rng.hpp"
#include "amh/tensor.hpp"

namespace amh {

enum class Modality { Audio = 0, Text = 1, Video = 2 };

/// "A", "T" or "V".
const char* modality_letter(Modality m);
Modality modality_from_letter(char c);

struct HopScheduleEntry {
  int hop_index = 0;  // 1-based
  Modality target = Modality::Video;
  std::array<Modality, 2> context{};

  bool operator==(const HopScheduleEntry&) const = default;
};

/// Throws ConfigError when n_hops < 1.
std::vector<HopScheduleEntry> hop_schedule(int n_hops);

/// Number of times `m` has been the target after `n_hops` hops.
int update_count(Modality m, int n_hops);

/// How attention maps are tied across hops.
enum class AttentionSharing {
  PerTarget,  // one map per target modality, reused on every revisit
  PerHop,     // a fresh map for every hop
};

const char* sharing_name(AttentionSharing s);
AttentionSharing sharing_from_name(const std::string& name);

struct AttentionParams {
  AttentionSharing sharing = AttentionSharing::PerTarget;
  // PerTarget: indexed by Modality (A, T, V). PerHop: indexed by hop - 1.
  std::vector<Tensor> maps;  // each [2 d_h, d_h]

  /// Negates the gradient reaching the video map. Test fixture for
  /// exercising the gradient checker against a known-bad backward pass.
  bool fault_negate_video_grad = false;

  static AttentionParams init(std::size_t hidden_dim, int n_hops, AttentionSharing sharing,
                              Rng& rng);

  const Tensor& map_for(const HopScheduleEntry& entry) const;
  void collect(std::vector<NamedTensor>& out) const;
};

/// Concatenation [u; v].
Tensor fuse_context(Tape& tape, const Tensor& u, const Tensor& v);

struct AttendResult {
  Tensor summary;  // [d_h]
  Tensor weights;  // [T], zero at padded positions
};

AttendResult attend(Tape& tape, const Tensor& context, const EncodedModality& target,
                    const Tensor& map);

struct HopState {
  std::array<Tensor, 3> reps;  // indexed by Modality
  std::array<int, 3> counts{0, 0, 0};

  const Tensor& rep(Modality m) const { return reps[static_cast<int>(m)]; }
  int count(Modality m) const { return counts[static_cast<int>(m)]; }
};

struct HopTrace {
  HopScheduleEntry entry;
  std::vector<double> weights;
};

struct AmhResult {
  Tensor fused;  // [3 d_h] = [rep_A; rep_T; rep_V]
  HopState state;
  std::vector<HopTrace> trace;
};

/// Runs `n_hops` hops (0 leaves every summary at its encoder last state).
AmhResult run_amh(Tape& tape, const EncodedModality& audio, const EncodedModality& text,
                  const EncodedModality& video, const AttentionParams& params, int n_hops);

}  // namespace amh
