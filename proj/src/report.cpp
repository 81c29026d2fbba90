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

#include "amh/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "amh/io.hpp"

namespace amh {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}, {"n", m.n}}; }

json to_json(const TrainConfig& c) {
  return {
      {"model", model_kind_name(c.model.kind)},
      {"hops", c.model.n_hops},
      {"hidden_dim", c.model.hidden_dim},
      {"embed_dim", c.model.embed_dim},
      {"vocab_size", c.model.vocab_size},
      {"audio_dim", c.model.audio_dim},
      {"video_dim", c.model.video_dim},
      {"attention_sharing", sharing_name(c.model.sharing)},
      {"labels", c.model.labels.names()},
      {"lr", c.learning_rate},
      {"clip_norm", c.clip_norm},
      {"batch_size", c.batch_size},
      {"max_epochs", c.max_epochs},
      {"patience", c.patience},
      {"runs_per_fold", c.runs_per_fold},
      {"seed", c.seed},
      {"parallel", c.parallel},
  };
}

json to_json(const EvalReport& r, const LabelSet& labels) {
  json support = json::object();
  for (std::size_t c = 0; c < r.support.size() && c < labels.size(); ++c) {
    support[labels.name(c)] = r.support[c];
  }
  return {{"fold", r.fold},
          {"wa", r.wa},
          {"ua", r.ua},
          {"support", support},
          {"confusion", r.confusion}};
}

json to_json(const TrainSummary& s) {
  return {
      {"all_runs", {{"wa", to_json(s.wa_all)}, {"ua", to_json(s.ua_all)}}},
      {"across_folds", {{"wa", to_json(s.wa_folds)}, {"ua", to_json(s.ua_folds)}}},
      {"across_run_seeds", {{"wa", to_json(s.wa_runs)}, {"ua", to_json(s.ua_runs)}}},
  };
}

json to_json(const Provenance& p) {
  return {{"command", p.command},
          {"manifest", p.manifest_path},
          {"manifest_hash", p.manifest_hash},
          {"seed", p.seed},
          {"generated_at", p.generated_at}};
}

json to_json(const GradCheckReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"name", e.name},
                       {"size", e.size},
                       {"max_rel_error", e.max_rel_error},
                       {"max_abs_error", e.max_abs_error},
                       {"passed", e.passed}});
  }
  return {{"tolerance", r.tolerance}, {"passed", r.passed()}, {"parameters", entries}};
}

EvalReport pool_reports(std::span<const EvalReport> reports, std::size_t num_classes) {
  std::vector<std::size_t> truth, predicted;
  for (const auto& r : reports) {
    for (std::size_t c = 0; c < r.counts.size(); ++c) {
      for (std::size_t p = 0; p < r.counts[c].size(); ++p) {
        for (std::size_t k = 0; k < r.counts[c][p]; ++k) {
          truth.push_back(c);
          predicted.push_back(p);
        }
      }
    }
  }
  return score_predictions(truth, predicted, num_classes);
}

json train_report_json(const TrainResult& result, const TrainConfig& config,
                       const Provenance& provenance) {
  const LabelSet& labels = config.model.labels;
  json runs = json::array();
  std::vector<EvalReport> tests;
  for (const auto& r : result.runs) {
    runs.push_back({{"fold", r.fold},
                    {"run", r.run},
                    {"seed", r.seed},
                    {"best_epoch", r.best_epoch},
                    {"epochs_run", r.epochs_run},
                    {"best_dev_wa", r.best_dev_wa},
                    {"initial_train_loss", r.initial_train_loss},
                    {"final_train_loss", r.final_train_loss},
                    {"test", to_json(r.test, labels)}});
    tests.push_back(r.test);
  }
  const EvalReport pooled = pool_reports(tests, labels.size());
  return {{"provenance", to_json(provenance)},
          {"config", to_json(config)},
          {"summary", to_json(result.summary)},
          {"pooled_confusion", pooled.confusion},
          {"runs", runs}};
}

namespace {

std::string fmt_ms(const MeanStd& m) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f +- %.3f", m.mean, m.std);
  return buf;
}

}  // namespace

std::string train_report_text(const TrainResult& result, const TrainConfig& config,
                              const Provenance& provenance) {
  std::ostringstream os;
  os << "model " << model_kind_name(config.model.kind);
  if (config.model.kind == ModelKind::Amh) os << " (hops " << config.model.n_hops << ")";
  os << "  seed " << provenance.seed << "  manifest " << provenance.manifest_hash << "\n\n";
  os << std::left << std::setw(6) << "fold" << std::setw(6) << "run" << std::setw(8) << "epochs"
     << std::setw(10) << "dev_wa" << std::setw(10) << "test_wa" << std::setw(10) << "test_ua"
     << "\n";
  for (const auto& r : result.runs) {
    os << std::left << std::setw(6) << r.fold << std::setw(6) << r.run << std::setw(8)
       << r.epochs_run << std::fixed << std::setprecision(3) << std::setw(10) << r.best_dev_wa
       << std::setw(10) << r.test.wa << std::setw(10) << r.test.ua << "\n";
    os.unsetf(std::ios::fixed);
  }
  const auto& s = result.summary;
  os << "\n"
     << std::left << std::setw(18) << "grouping" << std::setw(20) << "WA" << "UA\n"
     << std::setw(18) << "all runs" << std::setw(20) << fmt_ms(s.wa_all) << fmt_ms(s.ua_all)
     << "\n"
     << std::setw(18) << "across folds" << std::setw(20) << fmt_ms(s.wa_folds)
     << fmt_ms(s.ua_folds) << "\n"
     << std::setw(18) << "across run seeds" << std::setw(20) << fmt_ms(s.wa_runs)
     << fmt_ms(s.ua_runs) << "\n";
  return os.str();
}

std::string confusion_csv(const std::vector<std::vector<double>>& confusion,
                          const LabelSet& labels) {
  std::string out = "true\\pred";
  for (const auto& n : labels.names()) out += "," + n;
  out += "\n";
  for (std::size_t c = 0; c < confusion.size(); ++c) {
    out += labels.name(c);
    for (double v : confusion[c]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

json sweep_report_json(const std::vector<SweepRow>& rows, const TrainConfig& config,
                       const Provenance& provenance) {
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"hops", r.n_hops}, {"summary", to_json(r.summary)}});
  }
  return {{"provenance", to_json(provenance)}, {"config", to_json(config)}, {"rows", table}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "hops,wa_mean,wa_std,ua_mean,ua_std\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n_hops) + "," + format_double(r.summary.wa_all.mean) + "," +
           format_double(r.summary.wa_all.std) + "," + format_double(r.summary.ua_all.mean) +
           "," + format_double(r.summary.ua_all.std) + "\n";
  }
  return out;
}

std::string sweep_text(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "hops" << std::setw(20) << "WA" << "UA\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(8) << ("AMH-" + std::to_string(r.n_hops)) << std::setw(20)
       << fmt_ms(r.summary.wa_all) << fmt_ms(r.summary.ua_all) << "\n";
  }
  return os.str();
}

std::string gradcheck_text(const GradCheckReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "parameter" << std::setw(8) << "size" << std::setw(16)
     << "max_rel_err" << "status\n";
  for (const auto& e : report.entries) {
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", e.max_rel_error);
    os << std::left << std::setw(16) << e.name << std::setw(8) << e.size << std::setw(16) << err
       << (e.passed ? "ok" : "FAIL") << "\n";
  }
  return os.str();
}

json trace_json(const std::vector<HopTrace>& trace) {
  json out = json::object();
  for (const auto& h : trace) out[std::to_string(h.entry.hop_index)] = h.weights;
  return out;
}

json schedule_json(const std::vector<HopScheduleEntry>& schedule) {
  json out = json::array();
  for (const auto& e : schedule) {
    out.push_back({{"hop", e.hop_index},
                   {"target", modality_letter(e.target)},
                   {"context", {modality_letter(e.context[0]), modality_letter(e.context[1])}}});
  }
  return out;
}

}  // namespace amh
