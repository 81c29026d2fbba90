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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "amh/data.hpp"
#include "amh/metrics.hpp"
#include "amh/model.hpp"
#include "amh/optimizer.hpp"

namespace amh {

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  /// Epochs without a dev-WA improvement before stopping.
  std::size_t patience = 10;
  std::size_t runs_per_fold = 10;
  std::uint64_t seed = 0;
  /// Concurrent (fold, run) workers.
  std::size_t parallel = 1;

  void validate() const;
};

/// Seed of run `run` on fold `fold`.
std::uint64_t run_seed(std::uint64_t seed, std::size_t fold, std::size_t run);

struct RunResult {
  std::size_t fold = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  EvalReport test;
  double best_dev_wa = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0;
  std::vector<double> epoch_loss;  // mean minibatch loss per epoch
  std::vector<double> dev_wa;      // per epoch
  Model model;                     // parameters of the best dev epoch
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& values);

/// Spread of test metrics, grouped three ways: every (fold, run) result;
/// per-fold means across folds; per-run-index means across run indices.
struct TrainSummary {
  MeanStd wa_all, ua_all;
  MeanStd wa_folds, ua_folds;
  MeanStd wa_runs, ua_runs;
};

struct TrainResult {
  std::vector<RunResult> runs;  // ordered by (fold, run)
  TrainSummary summary;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Index samples by id. Throws DataError on duplicates.
std::vector<const MultimodalSample*> select_samples(const std::vector<MultimodalSample>& corpus,
                                                    const std::vector<std::string>& ids);

/**
 * One training run: initialize from `seed`, shuffle each epoch, minibatch
 * backward -> clip -> Adam, evaluate dev WA after each epoch and keep the
 * best parameters; stop after `patience` epochs without improvement. The
 * returned model is the best dev epoch's; its test metrics are reported.
 * A non-finite loss throws TrainingError.
 */
RunResult train_run(const TrainConfig& config, const std::vector<const MultimodalSample*>& train,
                    const std::vector<const MultimodalSample*>& dev,
                    const std::vector<const MultimodalSample*>& test, std::size_t fold,
                    std::size_t run, const ProgressFn& progress = {});

/// Every fold x runs_per_fold run, optionally in parallel.
TrainResult train(const TrainConfig& config, const std::vector<MultimodalSample>& corpus,
                  const std::vector<FoldSplit>& folds, const ProgressFn& progress = {});

TrainSummary summarize(const std::vector<RunResult>& runs);

struct SweepRow {
  int n_hops = 0;
  TrainSummary summary;
};

/// train() with an AMH model for each hop count.
std::vector<SweepRow> hop_sweep(const TrainConfig& config,
                                const std::vector<MultimodalSample>& corpus,
                                const std::vector<FoldSplit>& folds, const std::vector<int>& hops,
                                const ProgressFn& progress = {});

}  // namespace amh
