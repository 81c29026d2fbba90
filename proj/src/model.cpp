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

#include "amh/model.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <sstream>

#include "amh/error.hpp"
#include "amh/io.hpp"

namespace amh {

// ---------------------------------------------------------------------------
// Labels

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("label set: no classes");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n.empty() || n.find_first_of(",\t\n\r ") != std::string::npos) {
      throw ConfigError("label set: invalid class name '" + n + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[j] == n) throw ConfigError("label set: duplicate class name '" + n + "'");
    }
  }
}

LabelSet LabelSet::emotions() {
  return LabelSet({"angry", "excite", "happy", "sad", "frustrated", "surprise", "neutral"});
}

LabelSet LabelSet::numbered(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("class" + std::to_string(i));
  return LabelSet(std::move(names));
}

std::size_t LabelSet::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DataError("unknown label '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

// ---------------------------------------------------------------------------
// Config

const char* model_kind_name(ModelKind kind) { return kind == ModelKind::Amh ? "amh" : "mdre"; }

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "amh") return ModelKind::Amh;
  if (name == "mdre") return ModelKind::Mdre;
  throw ConfigError("unknown model kind '" + name + "' (expected amh or mdre)");
}

void ModelConfig::validate() const {
  if (kind == ModelKind::Amh && n_hops < 1) throw ConfigError("hops must be ≥ 1");
  if (hidden_dim < 1) throw ConfigError("hidden dim must be >= 1");
  if (embed_dim < 1) throw ConfigError("embedding dim must be >= 1");
  if (vocab_size < 1) throw ConfigError("vocab size must be >= 1");
  if (audio_dim < 1) throw ConfigError("audio dim must be >= 1");
  if (video_dim < 1) throw ConfigError("video dim must be >= 1");
  if (labels.size() < 2) throw ConfigError("need at least two classes");
}

// ---------------------------------------------------------------------------
// Heads

ClassifierParams ClassifierParams::init(std::size_t in_dim, std::size_t classes, Rng& rng) {
  return {glorot_uniform(in_dim, classes, rng), Tensor::zeros({classes}, true)};
}

Tensor head_logits(Tape& tape, const Tensor& features, const ClassifierParams& head) {
  if (features.rank() != 1 || features.dim(0) != head.weight.dim(0)) {
    throw DimensionError("classify: features " + shape_string(features.shape()) +
                         " do not match output layer " + shape_string(head.weight.shape()));
  }
  return tape.add(tape.matmul(features, head.weight), head.bias);
}

Tensor classify(Tape& tape, const Tensor& fused, const ClassifierParams& head) {
  return tape.softmax(head_logits(tape, fused, head));
}

// ---------------------------------------------------------------------------
// Model

Model Model::init(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  Model m;
  m.config_ = config;
  const std::size_t d_h = config.hidden_dim;
  m.audio_encoder = GruParams::init(config.audio_dim, d_h, rng);
  m.text_encoder = GruParams::init(config.embed_dim, d_h, rng);
  m.video_encoder = GruParams::init(config.video_dim, d_h, rng);
  m.embedding = EmbeddingTable::init(config.vocab_size, config.embed_dim, rng);
  if (config.kind == ModelKind::Amh) {
    m.attention = AttentionParams::init(d_h, config.n_hops, config.sharing, rng);
    m.head = ClassifierParams::init(3 * d_h, config.num_classes(), rng);
  } else {
    m.fusion_dense = DenseParams{glorot_uniform(3 * d_h, d_h, rng), Tensor::zeros({d_h}, true)};
    m.head = ClassifierParams::init(d_h, config.num_classes(), rng);
  }
  return m;
}

std::vector<NamedTensor> Model::parameters() const {
  std::vector<NamedTensor> out;
  audio_encoder.collect("gru_A", out);
  text_encoder.collect("gru_T", out);
  video_encoder.collect("gru_V", out);
  out.push_back({"embedding", embedding.table});
  if (attention) attention->collect(out);
  if (fusion_dense) {
    out.push_back({"fusion.W", fusion_dense->weight});
    out.push_back({"fusion.b", fusion_dense->bias});
  }
  out.push_back({"head.W", head.weight});
  out.push_back({"head.b", head.bias});
  return out;
}

namespace {

struct Encodings {
  EncodedModality audio, text, video;
};

Encodings encode_all(Tape& tape, const MultimodalSample& sample, const Model& model) {
  auto wrap = [&](const char* what, auto&& fn) {
    try {
      return fn();
    } catch (const DimensionError& e) {
      throw DimensionError("sample '" + sample.id + "' " + what + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("sample '" + sample.id + "' " + what + ": " + e.what());
    }
  };
  Encodings enc;
  enc.audio = wrap("audio", [&] { return encode(tape, model.audio_encoder, sample.audio); });
  enc.text = wrap("text", [&] {
    return encode(tape, model.text_encoder, sample.text, model.embedding);
  });
  enc.video = wrap("video", [&] { return encode(tape, model.video_encoder, sample.video); });
  return enc;
}

}  // namespace

ForwardResult forward_amh(Tape& tape, const MultimodalSample& sample, const Model& model) {
  if (model.config().kind != ModelKind::Amh || !model.attention) {
    throw ConfigError("forward_amh: model is not an AMH model");
  }
  Encodings enc = encode_all(tape, sample, model);
  AmhResult hopped =
      run_amh(tape, enc.audio, enc.text, enc.video, *model.attention, model.config().n_hops);
  ForwardResult r;
  r.fused = hopped.fused;
  r.logits = head_logits(tape, hopped.fused, model.head);
  r.probs = tape.softmax(r.logits);
  r.trace = std::move(hopped.trace);
  return r;
}

ForwardResult forward_mdre(Tape& tape, const MultimodalSample& sample, const Model& model) {
  if (model.config().kind != ModelKind::Mdre || !model.fusion_dense) {
    throw ConfigError("forward_mdre: model is not a concat-fusion model");
  }
  Encodings enc = encode_all(tape, sample, model);
  ForwardResult r;
  r.fused = tape.concat({enc.audio.last_state, enc.text.last_state, enc.video.last_state});
  Tensor hidden = tape.tanh(tape.add(tape.matmul(r.fused, model.fusion_dense->weight),
                                     model.fusion_dense->bias));
  r.logits = head_logits(tape, hidden, model.head);
  r.probs = tape.softmax(r.logits);
  return r;
}

ForwardResult Model::forward(Tape& tape, const MultimodalSample& sample) const {
  return config_.kind == ModelKind::Amh ? forward_amh(tape, sample, *this)
                                        : forward_mdre(tape, sample, *this);
}

Tensor Model::loss(Tape& tape, std::span<const MultimodalSample* const> batch) const {
  if (batch.empty()) throw DataError("loss: empty batch");
  std::vector<Tensor> logits;
  std::vector<std::size_t> labels;
  logits.reserve(batch.size());
  for (const MultimodalSample* s : batch) {
    if (s->label >= config_.num_classes()) {
      throw DataError("sample '" + s->id + "': label " + std::to_string(s->label) +
                      " out of range");
    }
    logits.push_back(forward(tape, *s).logits);
    labels.push_back(s->label);
  }
  return tape.cross_entropy(tape.stack(logits), labels);
}

Tensor Model::loss(Tape& tape, std::span<const MultimodalSample> batch) const {
  std::vector<const MultimodalSample*> ptrs;
  for (const auto& s : batch) ptrs.push_back(&s);
  return loss(tape, std::span<const MultimodalSample* const>(ptrs));
}

std::vector<double> Model::predict(const MultimodalSample& sample) const {
  Tape tape;
  return forward(tape, sample).probs.to_vector();
}

std::size_t Model::predict_label(const MultimodalSample& sample) const {
  const auto probs = predict(sample);
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

Model Model::clone() const {
  Model m = *this;
  auto deep = [](Tensor& t) { t = t.clone(); };
  for (GruParams* g : {&m.audio_encoder, &m.text_encoder, &m.video_encoder}) {
    for (Tensor* t : {&g->w_z, &g->w_r, &g->w_h, &g->u_z, &g->u_r, &g->u_h, &g->b_z, &g->b_r,
                      &g->b_h}) {
      deep(*t);
    }
  }
  deep(m.embedding.table);
  if (m.attention) {
    for (auto& w : m.attention->maps) deep(w);
  }
  if (m.fusion_dense) {
    deep(m.fusion_dense->weight);
    deep(m.fusion_dense->bias);
  }
  deep(m.head.weight);
  deep(m.head.bias);
  return m;
}

void Model::assign_from(const Model& other) {
  auto mine = parameters();
  auto theirs = other.parameters();
  if (mine.size() != theirs.size()) throw ConfigError("assign_from: parameter sets differ");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].name != theirs[i].name || mine[i].tensor.shape() != theirs[i].tensor.shape()) {
      throw ConfigError("assign_from: parameter '" + mine[i].name + "' differs");
    }
    auto dst = mine[i].tensor.mutable_data();
    auto src = theirs[i].tensor.data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

// ---------------------------------------------------------------------------
// Checkpoint

std::string config_block(const ModelConfig& c) {
  std::ostringstream os;
  os << "kind=" << model_kind_name(c.kind) << '\n'
     << "n_hops=" << c.n_hops << '\n'
     << "hidden_dim=" << c.hidden_dim << '\n'
     << "embed_dim=" << c.embed_dim << '\n'
     << "vocab_size=" << c.vocab_size << '\n'
     << "audio_dim=" << c.audio_dim << '\n'
     << "video_dim=" << c.video_dim << '\n'
     << "sharing=" << sharing_name(c.sharing) << '\n'
     << "labels=";
  for (std::size_t i = 0; i < c.labels.size(); ++i) os << (i ? "," : "") << c.labels.name(i);
  os << '\n';
  return os.str();
}

ModelConfig parse_config_block(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("checkpoint: malformed config line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError("checkpoint: config block lacks '" + key + "'");
    return it->second;
  };
  auto get_size = [&](const std::string& key) {
    return static_cast<std::size_t>(std::stoull(get(key)));
  };
  ModelConfig c;
  c.kind = model_kind_from_name(get("kind"));
  c.n_hops = std::stoi(get("n_hops"));
  c.hidden_dim = get_size("hidden_dim");
  c.embed_dim = get_size("embed_dim");
  c.vocab_size = get_size("vocab_size");
  c.audio_dim = get_size("audio_dim");
  c.video_dim = get_size("video_dim");
  c.sharing = sharing_from_name(get("sharing"));
  std::vector<std::string> names;
  std::istringstream ls(get("labels"));
  std::string name;
  while (std::getline(ls, name, ',')) names.push_back(name);
  c.labels = LabelSet(std::move(names));
  return c;
}

namespace {

constexpr char kMagic[4] = {'A', 'M', 'H', '1'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint: truncated file");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const Model& model) {
  std::string out(kMagic, sizeof(kMagic));
  const std::string cfg = config_block(model.config());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.size()));
  out += cfg;
  const auto params = model.parameters();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    const Shape& shape = p.tensor.shape();
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (auto e : shape) put_le<std::uint64_t>(out, e);
    for (double v : p.tensor.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  write_file_atomic(path, out);
}

Model load_checkpoint(const std::string& path) {
  const std::string bytes = read_file(path);
  Reader in(bytes);
  if (in.get_bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw DataError("checkpoint: bad magic in " + path);
  }
  const auto cfg_len = in.get_le<std::uint32_t>();
  const ModelConfig config = parse_config_block(in.get_bytes(cfg_len));
  // Fresh model for the shapes; every value is overwritten below.
  Model model = Model::init(config, 0);
  auto params = model.parameters();
  const auto count = in.get_le<std::uint32_t>();
  if (count != params.size()) {
    throw DataError("checkpoint: " + std::to_string(count) + " tensors, expected " +
                    std::to_string(params.size()));
  }
  for (auto& p : params) {
    const auto name_len = in.get_le<std::uint32_t>();
    const std::string name = in.get_bytes(name_len);
    if (name != p.name) {
      throw DataError("checkpoint: tensor '" + name + "' where '" + p.name + "' was expected");
    }
    const auto rank = in.get_le<std::uint32_t>();
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(in.get_le<std::uint64_t>());
    if (shape != p.tensor.shape()) {
      throw DataError("checkpoint: tensor '" + name + "' has shape " + shape_string(shape) +
                      ", expected " + shape_string(p.tensor.shape()));
    }
    for (double& v : p.tensor.mutable_data()) {
      v = std::bit_cast<double>(in.get_le<std::uint64_t>());
    }
  }
  if (!in.at_end()) throw DataError("checkpoint: trailing bytes in " + path);
  return model;
}

}  // namespace amh
