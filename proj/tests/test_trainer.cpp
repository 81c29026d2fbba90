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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "amh/data.hpp"
#include "amh/error.hpp"
#include "amh/metrics.hpp"
#include "amh/optimizer.hpp"
#include "amh/report.hpp"
#include "amh/rng.hpp"
#include "amh/trainer.hpp"
#include "fixtures.hpp"

namespace amh {
namespace {

std::vector<NamedTensor> one_param(std::vector<double> value, std::vector<double> grad) {
  const std::size_t n = value.size();
  Tensor t = Tensor::from({n}, std::move(value), true);
  auto g = t.mutable_grad();
  std::copy(grad.begin(), grad.end(), g.begin());
  return {{"p", t}};
}

TEST(Clip, ScalesDownLargeGradients) {
  auto params = one_param({0, 0}, {3, 4});
  EXPECT_DOUBLE_EQ(global_grad_norm(params), 5.0);
  EXPECT_NEAR(clip_gradients(params, 1.0), 0.2, 1e-15);
  EXPECT_NEAR(params[0].tensor.grad()[0], 0.6, 1e-15);
  EXPECT_NEAR(params[0].tensor.grad()[1], 0.8, 1e-15);
}

TEST(Clip, LeavesSmallGradientsAlone) {
  auto params = one_param({0, 0}, {0.3, 0.4});
  EXPECT_EQ(clip_gradients(params, 1.0), 1.0);
  EXPECT_EQ(params[0].tensor.grad()[0], 0.3);
  EXPECT_EQ(params[0].tensor.grad()[1], 0.4);
}

TEST(Clip, NormSpansEveryTensor) {
  auto a = one_param({0}, {3});
  auto b = one_param({0}, {4});
  std::vector<NamedTensor> both{a[0], b[0]};
  EXPECT_DOUBLE_EQ(global_grad_norm(both), 5.0);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradient) {
  auto params = one_param({1.0, -2.0, 0.5}, {0.3, -7.0, 1e-3});
  Adam adam(params, AdamOptions{.learning_rate = 0.01});
  adam.step(params);
  const auto v = params[0].tensor.data();
  EXPECT_NEAR(v[0], 1.0 - 0.01, 1e-9);
  EXPECT_NEAR(v[1], -2.0 + 0.01, 1e-9);
  EXPECT_NEAR(v[2], 0.5 - 0.01, 1e-7);
  for (double g : params[0].tensor.grad()) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  auto params = one_param({1.0, 2.0}, {0.0, 0.0});
  Adam adam(params);
  adam.step(params);
  EXPECT_EQ(params[0].tensor.to_vector(), (std::vector<double>{1.0, 2.0}));
}

TEST(Adam, MinimizesAQuadratic) {
  Tensor x = Tensor::vector({3.0}, true);
  std::vector<NamedTensor> params{{"x", x}};
  Adam adam(params, AdamOptions{.learning_rate = 0.1});
  for (int i = 0; i < 50; ++i) {
    Tape tape;
    tape.backward(tape.sum(tape.mul(x, x)));
    adam.step(params);
  }
  EXPECT_LT(std::abs(x[0]), 0.5);
}

TEST(Metrics, WeightedAndUnweightedAccuracy) {
  // Class 0: 8 of 8 right. Class 1: 1 of 2. Class 2 has no support.
  std::vector<std::size_t> truth{0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  std::vector<std::size_t> pred{0, 0, 0, 0, 0, 0, 0, 0, 1, 0};
  const auto r = score_predictions(truth, pred, 3);
  EXPECT_DOUBLE_EQ(r.wa, 0.9);
  EXPECT_DOUBLE_EQ(r.ua, 0.75);
  EXPECT_EQ(r.support, (std::vector<std::size_t>{8, 2, 0}));
  EXPECT_DOUBLE_EQ(r.confusion[1][0], 0.5);
  EXPECT_EQ(r.confusion[2], (std::vector<double>{0, 0, 0}));
}

TEST(Metrics, MajorityClassPredictorHasLowUa) {
  std::vector<std::size_t> truth, pred;
  for (int i = 0; i < 90; ++i) truth.push_back(0);
  for (int i = 0; i < 10; ++i) truth.push_back(1);
  pred.assign(100, 0);
  const auto r = score_predictions(truth, pred, 2);
  EXPECT_DOUBLE_EQ(r.wa, 0.9);
  EXPECT_DOUBLE_EQ(r.ua, 0.5);
}

TEST(Metrics, PerfectPredictionsGiveIdentityConfusion) {
  std::vector<std::size_t> truth{0, 1, 2, 3, 4, 5, 6, 3};
  const auto r = score_predictions(truth, truth, 7);
  EXPECT_EQ(r.wa, 1.0);
  EXPECT_EQ(r.ua, 1.0);
  for (std::size_t c = 0; c < 7; ++c) {
    for (std::size_t p = 0; p < 7; ++p) EXPECT_EQ(r.confusion[c][p], c == p ? 1.0 : 0.0);
  }
}

TEST(Metrics, RandomGuessingApproachesChance) {
  Rng rng(11);
  std::vector<std::size_t> truth, pred;
  for (int i = 0; i < 70000; ++i) {
    truth.push_back(rng.below(7));
    pred.push_back(rng.below(7));
  }
  const auto r = score_predictions(truth, pred, 7);
  EXPECT_NEAR(r.wa, 1.0 / 7, 0.01);
  EXPECT_NEAR(r.ua, 1.0 / 7, 0.01);
}

TEST(Metrics, Errors) {
  std::vector<std::size_t> a{0, 1}, b{0};
  EXPECT_THROW(score_predictions(a, b, 2), DataError);
  Model m = Model::init(testing::tiny_config(ModelKind::Mdre), 0);
  EXPECT_THROW(evaluate(m, std::span<const MultimodalSample>{}), DataError);
}

TEST(Summary, MeanAndSampleStd) {
  const auto m = mean_std({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(m.n, 4u);
  EXPECT_EQ(mean_std({7}).std, 0.0);
  EXPECT_EQ(mean_std({}).n, 0u);
}

TEST(Summary, ThreeGroupings) {
  std::vector<RunResult> runs;
  // wa = fold + 10 * run, over 3 folds and 2 runs
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t r = 0; r < 2; ++r) {
      RunResult x;
      x.fold = f;
      x.run = r;
      x.test.wa = static_cast<double>(f) + 10.0 * static_cast<double>(r);
      x.test.ua = 1.0;
      runs.push_back(std::move(x));
    }
  }
  const auto s = summarize(runs);
  EXPECT_EQ(s.wa_all.n, 6u);
  EXPECT_DOUBLE_EQ(s.wa_all.mean, 6.0);
  EXPECT_EQ(s.wa_folds.n, 3u);
  EXPECT_NEAR(s.wa_folds.std, 1.0, 1e-12);  // fold means 5, 6, 7
  EXPECT_EQ(s.wa_runs.n, 2u);
  EXPECT_NEAR(s.wa_runs.std, std::sqrt(50.0), 1e-12);  // run means 1, 11
  EXPECT_EQ(s.ua_all.std, 0.0);
}

struct SmallCorpus {
  TrainConfig config;
  std::vector<MultimodalSample> samples;
  std::vector<FoldSplit> folds;
};

SmallCorpus small_corpus(ModelKind kind) {
  SmallCorpus c;
  c.config.model = testing::tiny_config(kind, 2, 4);
  c.config.model.labels = LabelSet::numbered(3);
  c.config.batch_size = 8;
  c.config.max_epochs = 3;
  c.config.patience = 2;
  c.config.runs_per_fold = 2;
  c.config.learning_rate = 0.01;
  auto spec = testing::spec_for(c.config.model, 30, 4);
  spec.rule = SyntheticRule::Copy;
  c.samples = generate_synthetic(spec);
  std::vector<std::string> ids;
  for (const auto& s : c.samples) ids.push_back(s.id);
  c.folds = make_folds(ids, 3, 0);
  return c;
}

TEST(Train, RunIsDeterministic) {
  auto c = small_corpus(ModelKind::Amh);
  const auto a = train(c.config, c.samples, c.folds);
  const auto b = train(c.config, c.samples, c.folds);
  ASSERT_EQ(a.runs.size(), 6u);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].epoch_loss, b.runs[i].epoch_loss);
    EXPECT_EQ(a.runs[i].test.confusion, b.runs[i].test.confusion);
  }
  Provenance p{"train", "m.tsv", "abc", 0, "then"};
  auto ja = train_report_json(a, c.config, p);
  p.generated_at = "now";
  auto jb = train_report_json(b, c.config, p);
  ja["provenance"].erase("generated_at");
  jb["provenance"].erase("generated_at");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Train, ParallelMatchesSerial) {
  auto c = small_corpus(ModelKind::Mdre);
  const auto serial = train(c.config, c.samples, c.folds);
  c.config.parallel = 3;
  const auto parallel = train(c.config, c.samples, c.folds);
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    EXPECT_EQ(serial.runs[i].fold, parallel.runs[i].fold);
    EXPECT_EQ(serial.runs[i].epoch_loss, parallel.runs[i].epoch_loss);
  }
}

TEST(Train, BestModelMatchesBestDevEpoch) {
  auto c = small_corpus(ModelKind::Amh);
  c.config.runs_per_fold = 1;
  c.config.max_epochs = 6;
  c.config.patience = 6;
  const auto r = train(c.config, c.samples, c.folds).runs[0];
  ASSERT_EQ(r.dev_wa.size(), r.epochs_run);
  const double best = *std::max_element(r.dev_wa.begin(), r.dev_wa.end());
  EXPECT_EQ(r.best_dev_wa, best);
  EXPECT_EQ(r.dev_wa[r.best_epoch - 1], best);
  auto dev = select_samples(c.samples, c.folds[0].dev);
  EXPECT_EQ(evaluate(r.model, dev).wa, best);
}

TEST(Train, EarlyStopping) {
  auto c = small_corpus(ModelKind::Mdre);
  c.config.runs_per_fold = 1;
  c.config.max_epochs = 50;
  c.config.patience = 1;
  for (const auto& r : train(c.config, c.samples, c.folds).runs) {
    EXPECT_LT(r.epochs_run, 50u);
    EXPECT_EQ(r.epochs_run, r.best_epoch + 1);
  }
}

TEST(Train, NonFiniteLossIsReported) {
  auto c = small_corpus(ModelKind::Amh);
  auto dev_ids = select_samples(c.samples, c.folds[0].dev);
  auto broken = c.samples;
  for (auto& s : broken) {
    s.audio.features.mutable_data()[0] = std::numeric_limits<double>::quiet_NaN();
  }
  auto bad = select_samples(broken, c.folds[0].train);
  try {
    train_run(c.config, bad, dev_ids, dev_ids, 0, 0);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
  }
}

TEST(Train, UnknownIdsAndBadConfig) {
  auto c = small_corpus(ModelKind::Amh);
  c.folds[0].test.push_back("ghost");
  EXPECT_THROW(train(c.config, c.samples, c.folds), DataError);
  c = small_corpus(ModelKind::Amh);
  c.config.learning_rate = 0;
  EXPECT_THROW(train(c.config, c.samples, c.folds), ConfigError);
  c = small_corpus(ModelKind::Amh);
  EXPECT_THROW(hop_sweep(c.config, c.samples, c.folds, {0}), ConfigError);
}

TEST(Train, SweepHasOneRowPerHopCount) {
  auto c = small_corpus(ModelKind::Mdre);
  c.config.runs_per_fold = 1;
  c.config.max_epochs = 1;
  const auto rows = hop_sweep(c.config, c.samples, c.folds, {1, 2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].n_hops, 2);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "hops,wa_mean,wa_std,ua_mean,ua_std");
  EXPECT_NE(sweep_text(rows).find("AMH-2"), std::string::npos);
}

TEST(Train, RunSeedsDiffer) {
  EXPECT_NE(run_seed(0, 0, 0), run_seed(0, 0, 1));
  EXPECT_NE(run_seed(0, 0, 0), run_seed(0, 1, 0));
  EXPECT_EQ(run_seed(5, 2, 3), run_seed(5, 2, 3));
}

}  // namespace
}  // namespace amh
