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

#include "amh/trainer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "amh/error.hpp"
#include "amh/rng.hpp"

namespace amh {

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(clip_norm > 0.0)) throw ConfigError("clip norm must be > 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (runs_per_fold < 1) throw ConfigError("runs per fold must be >= 1");
  if (parallel < 1) throw ConfigError("parallel must be >= 1");
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t fold, std::size_t run) {
  return derive_seed(seed, 0x666f6c64 /* "fold" */, fold, run);
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  r.n = values.size();
  if (values.empty()) return r;
  double s = 0.0;
  for (double v : values) s += v;
  r.mean = s / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

std::vector<const MultimodalSample*> select_samples(const std::vector<MultimodalSample>& corpus,
                                                    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, const MultimodalSample*> by_id;
  for (const auto& s : corpus) {
    if (!by_id.emplace(s.id, &s).second) throw DataError("duplicate sample id '" + s.id + "'");
  }
  std::vector<const MultimodalSample*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("unknown sample id '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

namespace {

double dataset_loss(const Model& model, const std::vector<const MultimodalSample*>& samples) {
  Tape tape;
  return model.loss(tape, std::span<const MultimodalSample* const>(samples)).item();
}

}  // namespace

RunResult train_run(const TrainConfig& config, const std::vector<const MultimodalSample*>& train,
                    const std::vector<const MultimodalSample*>& dev,
                    const std::vector<const MultimodalSample*>& test, std::size_t fold,
                    std::size_t run, const ProgressFn& progress) {
  config.validate();
  if (train.empty() || dev.empty() || test.empty()) {
    throw DataError("train: fold " + std::to_string(fold) + " has an empty split");
  }
  RunResult result;
  result.fold = fold;
  result.run = run;
  result.seed = run_seed(config.seed, fold, run);

  Model model = Model::init(config.model, result.seed);
  const auto params = model.parameters();
  Adam adam(params, AdamOptions{.learning_rate = config.learning_rate});
  Rng order_rng(derive_seed(result.seed, 1));

  result.initial_train_loss = dataset_loss(model, train);
  Model best = model.clone();
  double best_dev = -1.0;
  std::size_t since_best = 0;
  std::vector<const MultimodalSample*> order = train;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::span<const MultimodalSample* const> batch(order.data() + start, end - start);
      Tape tape;
      Tensor loss = model.loss(tape, batch);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw TrainingError("fold " + std::to_string(fold) + " run " + std::to_string(run) +
                            " epoch " + std::to_string(epoch) + ": non-finite loss (" +
                            std::to_string(value) + ") on batch starting with sample '" +
                            batch.front()->id + "'");
      }
      tape.backward(loss);
      clip_gradients(params, config.clip_norm);
      adam.step(params);
      loss_sum += value;
      ++batches;
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    result.epoch_loss.push_back(epoch_loss);

    const double dev_wa = evaluate(model, dev).wa;
    result.dev_wa.push_back(dev_wa);
    result.epochs_run = epoch;
    if (dev_wa > best_dev) {
      best_dev = dev_wa;
      best.assign_from(model);
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (progress) {
      std::ostringstream os;
      os << "fold " << fold << " run " << run << " epoch " << epoch << " loss " << epoch_loss
         << " dev_wa " << dev_wa;
      progress(os.str());
    }
    if (since_best >= config.patience) break;
  }

  result.best_dev_wa = best_dev;
  result.final_train_loss = dataset_loss(best, train);
  result.test = evaluate(best, test);
  result.test.fold = fold;
  result.model = std::move(best);
  return result;
}

TrainSummary summarize(const std::vector<RunResult>& runs) {
  TrainSummary s;
  std::vector<double> wa, ua;
  std::size_t n_folds = 0, n_runs = 0;
  for (const auto& r : runs) {
    wa.push_back(r.test.wa);
    ua.push_back(r.test.ua);
    n_folds = std::max(n_folds, r.fold + 1);
    n_runs = std::max(n_runs, r.run + 1);
  }
  s.wa_all = mean_std(wa);
  s.ua_all = mean_std(ua);

  auto grouped = [&](bool by_fold, bool use_wa) {
    const std::size_t groups = by_fold ? n_folds : n_runs;
    std::vector<double> sums(groups, 0.0);
    std::vector<std::size_t> counts(groups, 0);
    for (const auto& r : runs) {
      const std::size_t g = by_fold ? r.fold : r.run;
      sums[g] += use_wa ? r.test.wa : r.test.ua;
      counts[g] += 1;
    }
    std::vector<double> means;
    for (std::size_t g = 0; g < groups; ++g) {
      if (counts[g]) means.push_back(sums[g] / static_cast<double>(counts[g]));
    }
    return mean_std(means);
  };
  s.wa_folds = grouped(true, true);
  s.ua_folds = grouped(true, false);
  s.wa_runs = grouped(false, true);
  s.ua_runs = grouped(false, false);
  return s;
}

TrainResult train(const TrainConfig& config, const std::vector<MultimodalSample>& corpus,
                  const std::vector<FoldSplit>& folds, const ProgressFn& progress) {
  config.validate();
  if (folds.empty()) throw ConfigError("train: no folds");

  struct Job {
    const FoldSplit* split;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (const auto& f : folds) {
    for (std::size_t r = 0; r < config.runs_per_fold; ++r) jobs.push_back({&f, r});
  }
  // Resolve ids up front so a bad fold fails before any training.
  std::vector<std::array<std::vector<const MultimodalSample*>, 3>> resolved;
  for (const auto& f : folds) {
    resolved.push_back({select_samples(corpus, f.train), select_samples(corpus, f.dev),
                        select_samples(corpus, f.test)});
  }

  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  ProgressFn locked_progress;
  if (progress) {
    locked_progress = [&](const std::string& line) {
      std::lock_guard lock(progress_mutex);
      progress(line);
    };
  }

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const std::size_t f = static_cast<std::size_t>(jobs[i].split - folds.data());
        const auto& sets = resolved[f];
        results[i] = train_run(config, sets[0], sets[1], sets[2], jobs[i].split->fold,
                               jobs[i].run, locked_progress);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t workers = std::min(config.parallel, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  TrainResult out;
  out.runs = std::move(results);
  out.summary = summarize(out.runs);
  return out;
}

std::vector<SweepRow> hop_sweep(const TrainConfig& config,
                                const std::vector<MultimodalSample>& corpus,
                                const std::vector<FoldSplit>& folds, const std::vector<int>& hops,
                                const ProgressFn& progress) {
  if (hops.empty()) throw ConfigError("sweep: empty hop range");
  std::vector<SweepRow> rows;
  for (int n : hops) {
    if (n < 1) throw ConfigError("hops must be ≥ 1");
    TrainConfig c = config;
    c.model.kind = ModelKind::Amh;
    c.model.n_hops = n;
    rows.push_back({n, train(c, corpus, folds, progress).summary});
  }
  return rows;
}

}  // namespace amh
