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

#include "amh/data.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "amh/error.hpp"
#include "amh/io.hpp"
#include "amh/rng.hpp"

namespace amh {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).string();
}

double parse_double(const std::string& field, const std::string& where) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ')) ++begin;
  while (end > begin && (end[-1] == ' ')) --end;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw DataError(where + ": cannot parse '" + field + "' as a number");
  }
  return v;
}

Tensor read_feature_csv(const std::string& path, const std::string& sample_id,
                        const char* modality, std::size_t expected_dim) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != expected_dim) {
      throw DataError("sample '" + sample_id + "' " + modality + ": row " +
                      std::to_string(rows + 1) + " of " + path + " has " +
                      std::to_string(fields.size()) + " values, expected " +
                      std::to_string(expected_dim));
    }
    for (const auto& f : fields) values.push_back(parse_double(f, path));
    ++rows;
  }
  if (rows == 0) {
    throw DataError("sample '" + sample_id + "' " + modality + ": empty feature file " + path);
  }
  return Tensor::matrix(rows, expected_dim, std::move(values));
}

std::vector<std::size_t> read_tokens(const std::string& path, const std::string& sample_id,
                                     std::optional<std::size_t> vocab_size) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::vector<std::size_t> tokens;
  std::string tok;
  while (in >> tok) {
    std::size_t id = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw DataError("sample '" + sample_id + "' text: bad token id '" + tok + "' in " + path);
    }
    if (vocab_size && id >= *vocab_size) {
      throw DataError("sample '" + sample_id + "' text: token id " + std::to_string(id) +
                      " out of vocabulary range (vocab size " + std::to_string(*vocab_size) +
                      ")");
    }
    tokens.push_back(id);
  }
  if (tokens.empty()) throw DataError("sample '" + sample_id + "' text: empty token file " + path);
  return tokens;
}

std::string feature_csv(const Tensor& features, std::size_t length) {
  std::string out;
  const std::size_t d = features.dim(1);
  const auto data = features.data();
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out.push_back(',');
      out += format_double(data[t * d + j]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace

LabelSet load_label_set(const std::string& manifest_path) {
  const fs::path sidecar = fs::path(manifest_path).parent_path() / "labels.txt";
  if (!fs::exists(sidecar)) return LabelSet::emotions();
  std::istringstream in(read_file(sidecar.string()));
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (!line.empty()) names.push_back(line);
  }
  return LabelSet(std::move(names));
}

std::vector<MultimodalSample> load_corpus(const std::string& manifest_path,
                                          const CorpusFormat& format) {
  const std::string text = read_file(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kManifestHeader) {
    throw DataError(manifest_path + ": missing or wrong header (expected id, label, audio_path, "
                    "text_path, video_path separated by tabs)");
  }
  std::vector<MultimodalSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 5) {
      throw DataError(manifest_path + ":" + std::to_string(line_no) + ": expected 5 columns, got " +
                      std::to_string(cols.size()));
    }
    MultimodalSample s;
    s.id = cols[0];
    try {
      s.label = format.labels.index_of(cols[1]);
    } catch (const DataError&) {
      throw DataError("sample '" + s.id + "': unknown label '" + cols[1] + "'");
    }
    Tensor audio = read_feature_csv(resolve(base, cols[2]), s.id, "audio", format.audio_dim);
    s.audio = {audio, audio.dim(0)};
    s.text.tokens = read_tokens(resolve(base, cols[3]), s.id, format.vocab_size);
    s.text.length = s.text.tokens.size();
    Tensor video = read_feature_csv(resolve(base, cols[4]), s.id, "video", format.video_dim);
    s.video = {video, video.dim(0)};
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string write_corpus(const std::string& dir, const std::vector<MultimodalSample>& samples,
                         const LabelSet& labels) {
  const fs::path root(dir);
  fs::create_directories(root / "audio");
  fs::create_directories(root / "text");
  fs::create_directories(root / "video");
  std::string manifest = std::string(kManifestHeader) + "\n";
  for (const auto& s : samples) {
    if (s.id.find_first_of("\t\n/\\") != std::string::npos || s.id.empty()) {
      throw DataError("write_corpus: sample id '" + s.id + "' is not usable as a file name");
    }
    const std::string audio_rel = "audio/" + s.id + ".csv";
    const std::string text_rel = "text/" + s.id + ".txt";
    const std::string video_rel = "video/" + s.id + ".csv";
    write_file_atomic((root / audio_rel).string(), feature_csv(s.audio.features, s.audio.length));
    std::string tokens;
    for (std::size_t t = 0; t < s.text.length; ++t) {
      if (t) tokens.push_back(' ');
      tokens += std::to_string(s.text.tokens[t]);
    }
    tokens.push_back('\n');
    write_file_atomic((root / text_rel).string(), tokens);
    write_file_atomic((root / video_rel).string(), feature_csv(s.video.features, s.video.length));
    manifest += s.id + '\t' + labels.name(s.label) + '\t' + audio_rel + '\t' + text_rel + '\t' +
                video_rel + '\n';
  }
  std::string label_text;
  for (const auto& n : labels.names()) label_text += n + '\n';
  write_file_atomic((root / "labels.txt").string(), label_text);
  const std::string manifest_path = (root / "manifest.tsv").string();
  write_file_atomic(manifest_path, manifest);
  return manifest_path;
}

std::vector<FoldSplit> make_folds(const std::vector<std::string>& ids, std::size_t n_folds,
                                  std::uint64_t seed) {
  if (n_folds < 3) throw ConfigError("make_folds: need at least 3 folds");
  if (ids.size() < n_folds) {
    throw ConfigError("make_folds: " + std::to_string(ids.size()) + " ids cannot fill " +
                      std::to_string(n_folds) + " folds");
  }
  std::vector<std::string> order = ids;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<std::vector<std::string>> folds(n_folds);
  const std::size_t base = order.size() / n_folds;
  const std::size_t extra = order.size() % n_folds;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n_folds; ++k) {
    const std::size_t size = base + (k < extra ? 1 : 0);
    folds[k].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }

  std::vector<FoldSplit> splits;
  for (std::size_t k = 0; k < n_folds; ++k) {
    FoldSplit split;
    split.fold = k;
    split.test = folds[k];
    split.dev = folds[(k + 1) % n_folds];
    for (std::size_t j = 0; j < n_folds; ++j) {
      if (j == k || j == (k + 1) % n_folds) continue;
      split.train.insert(split.train.end(), folds[j].begin(), folds[j].end());
    }
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace amh
