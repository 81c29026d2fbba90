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

// Corpus files.
//
// A corpus is a UTF-8 TSV manifest with the header
//
//   id<TAB>label<TAB>audio_path<TAB>text_path<TAB>video_path
//
// and one row per utterance. Relative paths resolve against the manifest's
// directory. Audio and video files are CSV, one time step per row; text
// files hold whitespace-separated integer token ids. Sequence length is the
// number of rows (tokens); ragged rows are rejected. An optional
// `labels.txt` next to the manifest lists class names in index order; when
// absent the seven emotion classes are used.
//
// Label filtering (majority vote, dropping rare classes) happens upstream:
// manifests are expected to be already filtered.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amh/sample.hpp"

namespace amh {

inline constexpr const char* kManifestHeader = "id\tlabel\taudio_path\ttext_path\tvideo_path";

struct CorpusFormat {
  std::size_t audio_dim = 120;
  std::size_t video_dim = 2048;
  /// When set, token ids must be below it.
  std::optional<std::size_t> vocab_size;
  LabelSet labels = LabelSet::emotions();
};

/// `labels.txt` beside the manifest, or the emotion set if there is none.
LabelSet load_label_set(const std::string& manifest_path);

std::vector<MultimodalSample> load_corpus(const std::string& manifest_path,
                                          const CorpusFormat& format);

/// Writes manifest.tsv, labels.txt and per-sample feature files under `dir`.
/// Returns the manifest path. Only the first `length` rows of each sequence
/// are written.
std::string write_corpus(const std::string& dir, const std::vector<MultimodalSample>& samples,
                         const LabelSet& labels);

struct FoldSplit {
  std::size_t fold = 0;
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

/**
 * Cross-validation splits. Ids are shuffled by `seed` and cut into
 * `n_folds` contiguous folds (the first n % k folds hold one extra id).
 * Split k tests on fold k, develops on fold (k + 1) mod n and trains on the
 * rest.
 */
std::vector<FoldSplit> make_folds(const std::vector<std::string>& ids, std::size_t n_folds,
                                  std::uint64_t seed);

}  // namespace amh
