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

#include "amh/encoder.hpp"

namespace amh {

/// Ordered class names; a label is an index into the list.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> names);

  /// angry, excite, happy, sad, frustrated, surprise, neutral.
  static LabelSet emotions();
  /// class0 .. class{n-1}, used by synthetic corpora.
  static LabelSet numbered(std::size_t n);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  /// Throws DataError for an unknown name.
  std::size_t index_of(const std::string& name) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> names_;
};

struct MultimodalSample {
  std::string id;
  ModalitySequence audio;
  TokenSequence text;
  ModalitySequence video;
  std::size_t label = 0;
};

}  // namespace amh
