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

#include <span>
#include <string>
#include <vector>

#include "amh/gradcheck.hpp"
#include "amh/hopping.hpp"
#include "amh/metrics.hpp"
#include "amh/trainer.hpp"
#include "json.hpp"

namespace amh {

/// Where a report came from. `generated_at` is the only field allowed to
/// differ between two runs with identical inputs.
struct Provenance {
  std::string command;
  std::string manifest_path;
  std::string manifest_hash;  // git blob id of the manifest bytes
  std::uint64_t seed = 0;
  std::string generated_at;
};

std::string utc_timestamp();

nlohmann::json to_json(const MeanStd& m);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const EvalReport& report, const LabelSet& labels);
nlohmann::json to_json(const TrainSummary& summary);
nlohmann::json to_json(const Provenance& provenance);
nlohmann::json to_json(const GradCheckReport& report);

/// Confusion pooled over several reports: counts summed, then rows
/// normalized.
EvalReport pool_reports(std::span<const EvalReport> reports, std::size_t num_classes);

nlohmann::json train_report_json(const TrainResult& result, const TrainConfig& config,
                                 const Provenance& provenance);
std::string train_report_text(const TrainResult& result, const TrainConfig& config,
                              const Provenance& provenance);

/// Header row of class names, then one row per true class.
std::string confusion_csv(const std::vector<std::vector<double>>& confusion,
                          const LabelSet& labels);

nlohmann::json sweep_report_json(const std::vector<SweepRow>& rows, const TrainConfig& config,
                                 const Provenance& provenance);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_text(const std::vector<SweepRow>& rows);

std::string gradcheck_text(const GradCheckReport& report);

/// Attention trace of one sample: {"hop index": [weights...]}.
nlohmann::json trace_json(const std::vector<HopTrace>& trace);
/// Hop targets and query pairs of a schedule.
nlohmann::json schedule_json(const std::vector<HopScheduleEntry>& schedule);

}  // namespace amh
