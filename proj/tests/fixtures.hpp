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

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "amh/model.hpp"
#include "amh/synthetic.hpp"

namespace amh::testing {

/// Small dims so whole-model gradient checks stay fast.
inline ModelConfig tiny_config(ModelKind kind, int hops = 3, std::size_t hidden = 6) {
  ModelConfig c;
  c.kind = kind;
  c.n_hops = hops;
  c.hidden_dim = hidden;
  c.embed_dim = 4;
  c.vocab_size = 14;
  c.audio_dim = 5;
  c.video_dim = 3;
  c.labels = LabelSet::emotions();
  return c;
}

inline SyntheticSpec spec_for(const ModelConfig& c, std::size_t n, std::uint64_t seed) {
  SyntheticSpec s;
  s.n_samples = n;
  s.min_length = 1;
  s.max_length = 4;
  s.audio_dim = c.audio_dim;
  s.video_dim = c.video_dim;
  s.vocab_size = c.vocab_size;
  s.num_classes = c.num_classes();
  s.noise = 0.3;
  s.seed = seed;
  return s;
}

inline std::vector<MultimodalSample> tiny_batch(const ModelConfig& c, std::size_t n,
                                                std::uint64_t seed = 0) {
  return generate_synthetic(spec_for(c, n, seed));
}

// Removes every scratch directory at process exit.
struct ScratchRegistry {
  std::vector<std::filesystem::path> dirs;
  ~ScratchRegistry() {
    std::error_code ec;
    for (const auto& d : dirs) std::filesystem::remove_all(d, ec);
  }
};
inline ScratchRegistry scratch_registry;

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("amh_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  scratch_registry.dirs.push_back(dir);
  return dir;
}

}  // namespace amh::testing
