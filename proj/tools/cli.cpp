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

#include "amh/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include "amh/data.hpp"
#include "amh/error.hpp"
#include "amh/gradcheck.hpp"
#include "amh/io.hpp"
#include "amh/model.hpp"
#include "amh/report.hpp"
#include "amh/synthetic.hpp"
#include "amh/trainer.hpp"

namespace amh {

namespace fs = std::filesystem;

namespace {

// Sidecar written by `synth` next to the manifest; supplies feature dims
// that were not given on the command line.
constexpr const char* kCorpusConfigName = "corpus.cfg";

struct RunOptions {
  std::string data;
  std::string out_dir = "amh_out";
  std::string model = "amh";
  int hops = 3;
  std::string hop_range = "1..9";
  std::size_t hidden_dim = 200;
  std::size_t embed_dim = 100;
  std::size_t vocab_size = 10000;
  std::size_t audio_dim = 120;
  std::size_t video_dim = 2048;
  std::string sharing = "per-target";
  double lr = 1e-3;
  double clip = 1.0;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::size_t folds = 10;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::size_t parallel = 1;
  std::string checkpoints = "best";
  bool quiet = false;

  CLI::Option* vocab_opt = nullptr;
  CLI::Option* audio_opt = nullptr;
  CLI::Option* video_opt = nullptr;
};

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(path + ": expected key=value, got '" + line + "'");
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::size_t parse_size(const std::string& text, const std::string& where) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw DataError(where + ": bad integer '" + text + "'");
  return static_cast<std::size_t>(v);
}

void add_data_options(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--data", o.data, "Corpus manifest (TSV), required");
  o.audio_opt = cmd.add_option("--audio-dim", o.audio_dim, "Audio feature dimension");
  o.video_opt = cmd.add_option("--video-dim", o.video_dim, "Video feature dimension");
  o.vocab_opt = cmd.add_option("--vocab-size", o.vocab_size, "Token vocabulary size");
}

void add_run_options(CLI::App& cmd, RunOptions& o, bool hop_range) {
  add_data_options(cmd, o);
  cmd.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd.add_option("--model", o.model, "Model kind: amh or mdre")->capture_default_str();
  if (hop_range) {
    cmd.add_option("--hops", o.hop_range, "Hop counts: a..b, a,b,c or a single value")
        ->capture_default_str();
  } else {
    cmd.add_option("--hops", o.hops, "Number of attention hops")->capture_default_str();
  }
  cmd.add_option("--hidden-dim", o.hidden_dim, "GRU hidden size d_h")->capture_default_str();
  cmd.add_option("--embed-dim", o.embed_dim, "Token embedding size")->capture_default_str();
  cmd.add_option("--sharing", o.sharing, "Attention map sharing: per-target or per-hop")
      ->capture_default_str();
  cmd.add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  cmd.add_option("--clip", o.clip, "Global gradient-norm clip")->capture_default_str();
  cmd.add_option("--batch-size", o.batch_size, "Minibatch size")->capture_default_str();
  cmd.add_option("--max-epochs", o.max_epochs, "Epoch limit")->capture_default_str();
  cmd.add_option("--patience", o.patience, "Early-stopping patience (epochs)")
      ->capture_default_str();
  cmd.add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  cmd.add_option("--runs", o.runs, "Runs (seeds) per fold")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Global seed")->capture_default_str();
  cmd.add_option("--parallel", o.parallel, "Concurrent (fold, run) workers")
      ->capture_default_str();
  cmd.add_option("--checkpoints", o.checkpoints, "Checkpoints to save: none, best or all")
      ->capture_default_str();
  cmd.add_flag("--quiet", o.quiet, "Suppress per-epoch progress");
}

void add_config_file(CLI::App& cmd, std::string& path) {
  // Consumed by expand_config_files before parsing; registered for --help.
  cmd.add_option("--config", path, "key=value file of flags; command-line flags take precedence");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Replaces `--config FILE` after the subcommand with the file's settings as
// `--key=value` tokens placed ahead of the remaining command-line flags, so
// that with a take-last policy the command line wins.
std::vector<std::string> expand_config_files(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::size_t sub = 1;
  while (sub < args.size() && !args[sub].empty() && args[sub][0] == '-') ++sub;
  if (sub >= args.size()) return args;

  std::vector<std::string> from_file, rest;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line.substr(0, line.find('#')));
      if (line.empty() || line.front() == '[') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path + ": expected key=value, got '" + line + "'");
      }
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
      }
      std::replace(key.begin(), key.end(), '_', '-');
      from_file.push_back("--" + key + "=" + value);
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub) + 1);
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

struct CorpusDims {
  std::size_t audio_dim, video_dim, vocab_size;
};

CorpusDims resolve_dims(const RunOptions& o) {
  CorpusDims dims{o.audio_dim, o.video_dim, o.vocab_size};
  const fs::path sidecar = fs::path(o.data).parent_path() / kCorpusConfigName;
  if (!fs::exists(sidecar)) return dims;
  const auto kv = read_key_values(sidecar.string());
  auto fill = [&](const CLI::Option* opt, const char* key, std::size_t& field) {
    auto it = kv.find(key);
    if (opt->count() == 0 && it != kv.end()) field = parse_size(it->second, sidecar.string());
  };
  fill(o.audio_opt, "audio_dim", dims.audio_dim);
  fill(o.video_opt, "video_dim", dims.video_dim);
  fill(o.vocab_opt, "vocab_size", dims.vocab_size);
  return dims;
}

TrainConfig train_config(const RunOptions& o, const CorpusDims& dims, const LabelSet& labels) {
  TrainConfig c;
  c.model.kind = model_kind_from_name(o.model);
  c.model.n_hops = o.hops;
  c.model.hidden_dim = o.hidden_dim;
  c.model.embed_dim = o.embed_dim;
  c.model.vocab_size = dims.vocab_size;
  c.model.audio_dim = dims.audio_dim;
  c.model.video_dim = dims.video_dim;
  c.model.sharing = sharing_from_name(o.sharing);
  c.model.labels = labels;
  c.learning_rate = o.lr;
  c.clip_norm = o.clip;
  c.batch_size = o.batch_size;
  c.max_epochs = o.max_epochs;
  c.patience = o.patience;
  c.runs_per_fold = o.runs;
  c.seed = o.seed;
  c.parallel = o.parallel;
  if (o.checkpoints != "none" && o.checkpoints != "best" && o.checkpoints != "all") {
    throw ConfigError("--checkpoints must be none, best or all");
  }
  return c;
}

struct LoadedCorpus {
  LabelSet labels;
  std::vector<MultimodalSample> samples;
  std::vector<FoldSplit> folds;
};

LoadedCorpus load_for_run(const RunOptions& o, const CorpusDims& dims) {
  if (!fs::is_regular_file(o.data)) throw DataError("missing file: " + o.data);
  LoadedCorpus lc;
  lc.labels = load_label_set(o.data);
  lc.samples = load_corpus(o.data, {dims.audio_dim, dims.video_dim, dims.vocab_size, lc.labels});
  std::vector<std::string> ids;
  for (const auto& s : lc.samples) ids.push_back(s.id);
  lc.folds = make_folds(ids, o.folds, o.seed);
  return lc;
}

Provenance provenance(const std::string& command, const std::string& manifest,
                      std::uint64_t seed) {
  return {command, manifest, git_blob_hash(read_file(manifest)), seed, utc_timestamp()};
}

void write_out(const fs::path& dir, const std::string& name, const std::string& contents) {
  write_file_atomic((dir / name).string(), contents);
}

ProgressFn progress_to(std::ostream& err, bool quiet) {
  if (quiet) return {};
  return [&err](const std::string& line) { err << line << '\n'; };
}

// Flag-only checks, done before any file is touched.
void validate_flags(const RunOptions& o) {
  train_config(o, {o.audio_dim, o.video_dim, o.vocab_size}, LabelSet::emotions()).validate();
  if (o.folds < 3) throw ConfigError("folds must be >= 3");
  if (o.data.empty()) throw ConfigError("--data is required");
}

int cmd_train(const RunOptions& o, std::ostream& out, std::ostream& err) {
  validate_flags(o);
  const CorpusDims dims = resolve_dims(o);
  const LabelSet labels = load_label_set(o.data);
  TrainConfig config = train_config(o, dims, labels);
  config.validate();
  const LoadedCorpus corpus = load_for_run(o, dims);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);

  const TrainResult result = train(config, corpus.samples, corpus.folds, progress_to(err, o.quiet));
  const Provenance prov = provenance("train", o.data, o.seed);

  std::vector<EvalReport> tests;
  for (const auto& r : result.runs) tests.push_back(r.test);
  const EvalReport pooled = pool_reports(tests, labels.size());

  write_out(dir, "report.json", train_report_json(result, config, prov).dump(2) + "\n");
  write_out(dir, "report.txt", train_report_text(result, config, prov));
  write_out(dir, "confusion.csv", confusion_csv(pooled.confusion, labels));

  if (o.checkpoints != "none") {
    fs::create_directories(dir / "checkpoints");
    std::map<std::size_t, const RunResult*> best;
    for (const auto& r : result.runs) {
      if (o.checkpoints == "all") {
        save_checkpoint((dir / "checkpoints" /
                         ("fold" + std::to_string(r.fold) + "_run" + std::to_string(r.run) +
                          ".amh"))
                            .string(),
                        r.model);
        continue;
      }
      auto it = best.find(r.fold);
      if (it == best.end() || r.best_dev_wa > it->second->best_dev_wa) best[r.fold] = &r;
    }
    for (const auto& [fold, r] : best) {
      save_checkpoint((dir / "checkpoints" / ("fold" + std::to_string(fold) + ".amh")).string(),
                      r->model);
    }
  }
  out << train_report_text(result, config, prov);
  out << "reports written to " << dir.string() << '\n';
  return 0;
}

std::vector<int> parse_hop_range(const std::string& text) {
  std::vector<int> hops;
  auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError("bad hop range '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (hi < lo) throw ConfigError("bad hop range '" + text + "'");
    for (int n = lo; n <= hi; ++n) hops.push_back(n);
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) hops.push_back(to_int(part));
  }
  if (hops.empty()) throw ConfigError("empty hop range");
  for (int n : hops) {
    if (n < 1) throw ConfigError("hops must be ≥ 1");
  }
  return hops;
}

int cmd_sweep(RunOptions o, std::ostream& out, std::ostream& err) {
  const std::vector<int> hops = parse_hop_range(o.hop_range);
  o.model = "amh";
  o.hops = hops.front();
  validate_flags(o);
  const CorpusDims dims = resolve_dims(o);
  const LabelSet labels = load_label_set(o.data);
  TrainConfig config = train_config(o, dims, labels);
  config.validate();
  const LoadedCorpus corpus = load_for_run(o, dims);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);

  const auto rows = hop_sweep(config, corpus.samples, corpus.folds, hops,
                              progress_to(err, o.quiet));
  const Provenance prov = provenance("sweep", o.data, o.seed);
  write_out(dir, "sweep.json", sweep_report_json(rows, config, prov).dump(2) + "\n");
  write_out(dir, "sweep.csv", sweep_csv(rows));
  write_out(dir, "sweep.txt", sweep_text(rows));
  out << sweep_text(rows);
  out << "reports written to " << dir.string() << '\n';
  return 0;
}

struct EvalOptions {
  std::string checkpoint;
  std::string data;
  std::string out_dir;
  long fold = -1;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
};

std::vector<MultimodalSample> load_for_model(const Model& model, const std::string& manifest) {
  if (!fs::is_regular_file(manifest)) throw DataError("missing file: " + manifest);
  const ModelConfig& mc = model.config();
  const LabelSet labels = load_label_set(manifest);
  if (!(labels == mc.labels)) {
    throw DataError(manifest + ": label set differs from the checkpoint's");
  }
  return load_corpus(manifest, {mc.audio_dim, mc.video_dim, mc.vocab_size, labels});
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const Model model = load_checkpoint(o.checkpoint);
  std::vector<MultimodalSample> samples = load_for_model(model, o.data);
  if (o.fold >= 0) {
    std::vector<std::string> ids;
    for (const auto& s : samples) ids.push_back(s.id);
    const auto folds = make_folds(ids, o.folds, o.seed);
    if (static_cast<std::size_t>(o.fold) >= folds.size()) {
      throw ConfigError("--fold must be < --folds");
    }
    const auto& test = folds[static_cast<std::size_t>(o.fold)].test;
    std::vector<MultimodalSample> subset;
    for (const auto* s : select_samples(samples, test)) subset.push_back(*s);
    samples = std::move(subset);
  }
  EvalReport report = evaluate(model, samples);
  if (o.fold >= 0) report.fold = static_cast<std::size_t>(o.fold);
  const LabelSet& labels = model.config().labels;

  if (!o.out_dir.empty()) {
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    nlohmann::json j = {{"provenance", to_json(provenance("eval", o.data, o.seed))},
                        {"checkpoint", o.checkpoint},
                        {"model", model_kind_name(model.config().kind)},
                        {"hops", model.config().n_hops},
                        {"samples", samples.size()},
                        {"report", to_json(report, labels)}};
    write_out(dir, "eval.json", j.dump(2) + "\n");
    write_out(dir, "confusion.csv", confusion_csv(report.confusion, labels));
  }
  out << "samples " << samples.size() << "  WA " << format_double(report.wa) << "  UA "
      << format_double(report.ua) << '\n';
  out << confusion_csv(report.confusion, labels);
  return 0;
}

struct GradcheckOptions {
  std::string model = "amh";
  int hops = 3;
  std::size_t hidden_dim = 16;
  std::size_t samples = 4;
  std::string sharing = "per-target";
  std::uint64_t seed = 0;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  bool inject_fault = false;
};

int cmd_gradcheck(const GradcheckOptions& o, std::ostream& out, std::ostream& err) {
  ModelConfig mc;
  mc.kind = model_kind_from_name(o.model);
  mc.n_hops = o.hops;
  mc.hidden_dim = o.hidden_dim;
  mc.embed_dim = 6;
  mc.vocab_size = 14;
  mc.audio_dim = 5;
  mc.video_dim = 4;
  mc.sharing = sharing_from_name(o.sharing);
  mc.labels = LabelSet::emotions();
  mc.validate();
  if (o.samples < 1) throw ConfigError("--samples must be >= 1");

  SyntheticSpec spec;
  spec.n_samples = o.samples;
  spec.min_length = 2;
  spec.max_length = 4;
  spec.audio_dim = mc.audio_dim;
  spec.video_dim = mc.video_dim;
  spec.vocab_size = mc.vocab_size;
  spec.num_classes = mc.num_classes();
  spec.noise = kSyntheticSigmaThreshold;
  spec.seed = o.seed;
  const auto batch = generate_synthetic(spec);

  Model model = Model::init(mc, o.seed);
  if (o.inject_fault && model.attention) model.attention->fault_negate_video_grad = true;
  const auto params = model.parameters();
  const GradCheckReport report = grad_check(
      [&](Tape& tape) { return model.loss(tape, std::span<const MultimodalSample>(batch)); },
      params, o.epsilon, o.tolerance);

  out << model_kind_name(mc.kind);
  if (mc.kind == ModelKind::Amh) out << "-" << mc.n_hops;
  out << "  d_h " << mc.hidden_dim << "  batch " << batch.size() << "  eps " << o.epsilon
      << "  tol " << o.tolerance << "\n";
  out << gradcheck_text(report);
  if (!report.passed()) {
    err << "gradient check failed for:";
    for (const auto& name : report.failing()) err << ' ' << name;
    err << '\n';
    return 1;
  }
  out << "all " << report.entries.size() << " parameter tensors within tolerance\n";
  return 0;
}

struct SynthOptions {
  std::string out_dir = "synth";
  std::string rule = "xor3";
  std::size_t n = 600;
  std::size_t classes = 4;
  std::size_t min_length = 4;
  std::size_t max_length = 8;
  std::size_t audio_dim = 8;
  std::size_t video_dim = 8;
  std::size_t vocab_size = 16;
  double noise = 0.1;
  std::uint64_t seed = 0;
  std::string id_prefix = "s";
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  SyntheticSpec spec;
  spec.n_samples = o.n;
  spec.num_classes = o.classes;
  spec.min_length = o.min_length;
  spec.max_length = o.max_length;
  spec.audio_dim = o.audio_dim;
  spec.video_dim = o.video_dim;
  spec.vocab_size = o.vocab_size;
  spec.noise = o.noise;
  spec.rule = rule_from_name(o.rule);
  spec.seed = o.seed;
  spec.id_prefix = o.id_prefix;
  spec.validate();

  const auto samples = generate_synthetic(spec);
  const LabelSet labels = LabelSet::numbered(spec.num_classes);
  const std::string manifest = write_corpus(o.out_dir, samples, labels);
  std::ostringstream cfg;
  cfg << "audio_dim=" << spec.audio_dim << "\nvideo_dim=" << spec.video_dim
      << "\nvocab_size=" << spec.vocab_size << "\nclasses=" << spec.num_classes
      << "\nrule=" << rule_name(spec.rule) << "\nnoise=" << format_double(spec.noise)
      << "\nseed=" << spec.seed << "\nn=" << spec.n_samples << '\n';
  write_file_atomic((fs::path(o.out_dir) / kCorpusConfigName).string(), cfg.str());

  std::vector<std::size_t> counts(spec.num_classes, 0);
  for (const auto& s : samples) ++counts[s.label];
  const std::size_t c = spec.num_classes;
  if (spec.rule == SyntheticRule::Copy) {
    out << "rule copy: label = c_A = c_T = c_V; each modality alone determines the label\n";
  } else {
    out << "rule xor3: label = (c_A + c_T + c_V) mod " << c
        << "; every single modality and every modality pair is independent of the label\n";
  }
  out << "noise sigma " << format_double(spec.noise) << " (decodable up to "
      << format_double(kSyntheticSigmaThreshold) << "): Bayes-optimal accuracy "
      << (spec.noise <= kSyntheticSigmaThreshold ? "~1.0" : "below 1.0") << '\n';
  out << "class counts:";
  for (std::size_t k = 0; k < c; ++k) out << ' ' << labels.name(k) << '=' << counts[k];
  out << "\nwrote " << samples.size() << " samples to " << manifest << '\n';
  return 0;
}

struct InspectOptions {
  std::string checkpoint;
  std::string data;
  std::vector<std::string> ids;
  std::string out_file;
};

int cmd_inspect(const InspectOptions& o, std::ostream& out) {
  const Model model = load_checkpoint(o.checkpoint);
  if (model.config().kind != ModelKind::Amh) {
    throw ConfigError("inspect-attention needs an amh checkpoint");
  }
  const auto samples = load_for_model(model, o.data);
  std::vector<const MultimodalSample*> chosen;
  if (o.ids.empty()) {
    if (samples.empty()) throw DataError(o.data + ": no samples");
    chosen.push_back(&samples.front());
  } else {
    chosen = select_samples(samples, o.ids);
  }
  const LabelSet& labels = model.config().labels;
  nlohmann::json per_sample = nlohmann::json::object();
  for (const auto* s : chosen) {
    Tape tape;
    const ForwardResult fr = model.forward(tape, *s);
    const auto probs = fr.probs.data();
    const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) -
                                                probs.begin());
    per_sample[s->id] = {{"label", labels.name(s->label)},
                         {"predicted", labels.name(best)},
                         {"trace", trace_json(fr.trace)}};
  }
  nlohmann::json j = {{"checkpoint", o.checkpoint},
                      {"hops", model.config().n_hops},
                      {"schedule", schedule_json(hop_schedule(model.config().n_hops))},
                      {"samples", per_sample}};
  const std::string text = j.dump(2) + "\n";
  if (o.out_file.empty()) {
    out << text;
  } else {
    write_file_atomic(o.out_file, text);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention-based multimodal hopping classifier: training and verification tools",
               "amh"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;  // unused after expansion

  RunOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "Cross-validated training; writes reports");
  add_run_options(*train_cmd, train_opts, false);
  add_config_file(*train_cmd, config_path);

  RunOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train AMH over a range of hop counts");
  add_run_options(*sweep_cmd, sweep_opts, true);
  add_config_file(*sweep_cmd, config_path);

  EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a corpus");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", eval_opts.data, "Corpus manifest (TSV)")->required();
  eval_cmd->add_option("--out", eval_opts.out_dir, "Directory for eval.json and confusion.csv");
  eval_cmd->add_option("--fold", eval_opts.fold, "Evaluate only this fold's test split");
  eval_cmd->add_option("--folds", eval_opts.folds, "Fold count used for --fold")
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval_opts.seed, "Fold seed used for --fold")
      ->capture_default_str();
  add_config_file(*eval_cmd, config_path);

  GradcheckOptions gc_opts;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gc_cmd->add_option("--model", gc_opts.model, "Model kind: amh or mdre")->capture_default_str();
  gc_cmd->add_option("--hops", gc_opts.hops, "Number of attention hops")->capture_default_str();
  gc_cmd->add_option("--hidden-dim", gc_opts.hidden_dim, "GRU hidden size")
      ->capture_default_str();
  gc_cmd->add_option("--samples", gc_opts.samples, "Synthetic batch size")
      ->capture_default_str();
  gc_cmd->add_option("--sharing", gc_opts.sharing, "per-target or per-hop")
      ->capture_default_str();
  gc_cmd->add_option("--seed", gc_opts.seed, "Seed")->capture_default_str();
  gc_cmd->add_option("--eps", gc_opts.epsilon, "Finite-difference step")->capture_default_str();
  gc_cmd->add_option("--tol", gc_opts.tolerance, "Max relative error")->capture_default_str();
  gc_cmd->add_flag("--inject-fault", gc_opts.inject_fault)->group("");
  add_config_file(*gc_cmd, config_path);

  SynthOptions syn_opts;
  auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  syn_cmd->add_option("--out", syn_opts.out_dir, "Output directory")->capture_default_str();
  syn_cmd->add_option("--rule", syn_opts.rule, "copy or xor3")->capture_default_str();
  syn_cmd->add_option("--n", syn_opts.n, "Number of samples")->capture_default_str();
  syn_cmd->add_option("--classes", syn_opts.classes, "Number of classes")
      ->capture_default_str();
  syn_cmd->add_option("--min-len", syn_opts.min_length, "Shortest sequence")
      ->capture_default_str();
  syn_cmd->add_option("--max-len", syn_opts.max_length, "Longest sequence")
      ->capture_default_str();
  syn_cmd->add_option("--audio-dim", syn_opts.audio_dim, "Audio feature dimension")
      ->capture_default_str();
  syn_cmd->add_option("--video-dim", syn_opts.video_dim, "Video feature dimension")
      ->capture_default_str();
  syn_cmd->add_option("--vocab-size", syn_opts.vocab_size, "Token vocabulary size")
      ->capture_default_str();
  syn_cmd->add_option("--noise", syn_opts.noise, "Noise level sigma")->capture_default_str();
  syn_cmd->add_option("--seed", syn_opts.seed, "Seed")->capture_default_str();
  syn_cmd->add_option("--id-prefix", syn_opts.id_prefix, "Sample id prefix")
      ->capture_default_str();
  add_config_file(*syn_cmd, config_path);

  InspectOptions ins_opts;
  auto* ins_cmd =
      app.add_subcommand("inspect-attention", "Dump per-hop attention weights as JSON");
  ins_cmd->add_option("--checkpoint", ins_opts.checkpoint, "AMH checkpoint")->required();
  ins_cmd->add_option("--data", ins_opts.data, "Corpus manifest (TSV)")->required();
  ins_cmd->add_option("--id", ins_opts.ids, "Sample id (repeatable; default: first sample)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  ins_cmd->add_option("--out", ins_opts.out_file, "Write JSON here instead of stdout");
  add_config_file(*ins_cmd, config_path);

  try {
    const std::vector<std::string> args = expand_config_files(argc, argv);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(train_opts, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, out, err);
    if (*eval_cmd) return cmd_eval(eval_opts, out);
    if (*gc_cmd) return cmd_gradcheck(gc_opts, out, err);
    if (*syn_cmd) return cmd_synth(syn_opts, out);
    if (*ins_cmd) return cmd_inspect(ins_opts, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace amh
