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

#include "amh/hopping.hpp"

#include <memory>

#include "amh/error.hpp"

namespace amh {

namespace {

constexpr std::array<Modality, 3> kCycle = {Modality::Video, Modality::Audio, Modality::Text};

std::array<Modality, 2> context_for(Modality target) {
  switch (target) {
    case Modality::Video: return {Modality::Audio, Modality::Text};
    case Modality::Audio: return {Modality::Text, Modality::Video};
    case Modality::Text: return {Modality::Audio, Modality::Video};
  }
  return {};
}

int idx(Modality m) { return static_cast<int>(m); }

}  // namespace

const char* modality_letter(Modality m) {
  switch (m) {
    case Modality::Audio: return "A";
    case Modality::Text: return "T";
    case Modality::Video: return "V";
  }
  return "?";
}

Modality modality_from_letter(char c) {
  switch (c) {
    case 'A': return Modality::Audio;
    case 'T': return Modality::Text;
    case 'V': return Modality::Video;
    default: throw ConfigError(std::string("unknown modality letter '") + c + "'");
  }
}

std::vector<HopScheduleEntry> hop_schedule(int n_hops) {
  if (n_hops < 1) throw ConfigError("hops must be ≥ 1");
  std::vector<HopScheduleEntry> schedule;
  schedule.reserve(static_cast<std::size_t>(n_hops));
  for (int k = 1; k <= n_hops; ++k) {
    const Modality target = kCycle[static_cast<std::size_t>((k - 1) % 3)];
    schedule.push_back({k, target, context_for(target)});
  }
  return schedule;
}

int update_count(Modality m, int n_hops) {
  int offset = 0;
  for (int i = 0; i < 3; ++i) {
    if (kCycle[static_cast<std::size_t>(i)] == m) offset = i;
  }
  return n_hops > offset ? (n_hops - offset + 2) / 3 : 0;
}

const char* sharing_name(AttentionSharing s) {
  return s == AttentionSharing::PerTarget ? "per-target" : "per-hop";
}

AttentionSharing sharing_from_name(const std::string& name) {
  if (name == "per-target") return AttentionSharing::PerTarget;
  if (name == "per-hop") return AttentionSharing::PerHop;
  throw ConfigError("unknown attention sharing '" + name + "' (expected per-target or per-hop)");
}

AttentionParams AttentionParams::init(std::size_t hidden_dim, int n_hops,
                                      AttentionSharing sharing, Rng& rng) {
  AttentionParams p;
  p.sharing = sharing;
  const int count = sharing == AttentionSharing::PerTarget ? 3 : n_hops;
  for (int i = 0; i < count; ++i) p.maps.push_back(glorot_uniform(2 * hidden_dim, hidden_dim, rng));
  return p;
}

const Tensor& AttentionParams::map_for(const HopScheduleEntry& entry) const {
  const std::size_t i = sharing == AttentionSharing::PerTarget
                            ? static_cast<std::size_t>(idx(entry.target))
                            : static_cast<std::size_t>(entry.hop_index - 1);
  if (i >= maps.size()) {
    throw ConfigError("attention: no map for hop " + std::to_string(entry.hop_index));
  }
  return maps[i];
}

void AttentionParams::collect(std::vector<NamedTensor>& out) const {
  if (sharing == AttentionSharing::PerTarget) {
    for (std::size_t i = 0; i < maps.size(); ++i) {
      out.push_back({std::string("attn.W_") + modality_letter(static_cast<Modality>(i)), maps[i]});
    }
  } else {
    for (std::size_t i = 0; i < maps.size(); ++i) {
      out.push_back({"attn.W_hop" + std::to_string(i + 1), maps[i]});
    }
  }
}

Tensor fuse_context(Tape& tape, const Tensor& u, const Tensor& v) {
  if (u.rank() != 1 || u.shape() != v.shape()) {
    throw DimensionError("fuse_context: shape mismatch " + shape_string(u.shape()) + " vs " +
                         shape_string(v.shape()));
  }
  return tape.concat({u, v});
}

AttendResult attend(Tape& tape, const Tensor& context, const EncodedModality& target,
                    const Tensor& map) {
  const Tensor& hs = target.hidden_states;
  if (hs.rank() != 2) {
    throw DimensionError("attend: hidden states must be [T, d_h], got " + shape_string(hs.shape()));
  }
  const std::size_t rows = hs.dim(0);
  const std::size_t d_h = hs.dim(1);
  if (target.length == 0 || rows == 0) throw DimensionError("attend: empty target sequence");
  if (target.length > rows) {
    throw DimensionError("attend: length " + std::to_string(target.length) + " exceeds " +
                         std::to_string(rows) + " hidden states");
  }
  if (map.rank() != 2 || map.dim(1) != d_h || context.rank() != 1 ||
      context.dim(0) != map.dim(0)) {
    throw DimensionError("attend: context " + shape_string(context.shape()) + ", map " +
                         shape_string(map.shape()) + ", hidden states " +
                         shape_string(hs.shape()) + " are inconsistent");
  }

  // C^T W first gives a d_h query; then one score per time step.
  Tensor query = tape.matmul(context, map);
  Tensor scores = tape.matmul(hs, query);
  auto mask = std::make_unique<bool[]>(rows);
  for (std::size_t i = 0; i < target.length; ++i) mask[i] = true;
  Tensor weights = tape.softmax(scores, std::span<const bool>(mask.get(), rows));
  Tensor summary = tape.matmul(weights, hs);
  return {summary, weights};
}

AmhResult run_amh(Tape& tape, const EncodedModality& audio, const EncodedModality& text,
                  const EncodedModality& video, const AttentionParams& params, int n_hops) {
  const std::size_t d_h = audio.last_state.numel();
  if (text.last_state.numel() != d_h || video.last_state.numel() != d_h) {
    throw DimensionError("run_amh: encoders disagree on hidden size");
  }
  if (n_hops < 0) throw ConfigError("run_amh: negative hop count");

  std::array<const EncodedModality*, 3> encoded{};
  encoded[idx(Modality::Audio)] = &audio;
  encoded[idx(Modality::Text)] = &text;
  encoded[idx(Modality::Video)] = &video;

  AmhResult result;
  HopState& state = result.state;
  for (int m = 0; m < 3; ++m) state.reps[static_cast<std::size_t>(m)] = encoded[m]->last_state;

  if (n_hops > 0) {
    for (const auto& entry : hop_schedule(n_hops)) {
      Tensor context =
          fuse_context(tape, state.rep(entry.context[0]), state.rep(entry.context[1]));
      Tensor map = params.map_for(entry);
      if (params.fault_negate_video_grad && entry.target == Modality::Video) {
        map = tape.negate_grad(map);
      }
      AttendResult attended = attend(tape, context, *encoded[idx(entry.target)], map);
      state.reps[idx(entry.target)] = attended.summary;
      state.counts[idx(entry.target)] += 1;
      result.trace.push_back({entry, attended.weights.to_vector()});
    }
  }

  result.fused = tape.concat({state.rep(Modality::Audio), state.rep(Modality::Text),
                              state.rep(Modality::Video)});
  return result;
}

}  // namespace amh
