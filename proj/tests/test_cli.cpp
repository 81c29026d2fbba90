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

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "amh/cli.hpp"
#include "amh/io.hpp"
#include "fixtures.hpp"
#include "json.hpp"

namespace amh {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "amh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string synth_corpus(const fs::path& dir, const std::string& rule = "copy") {
  const auto r = run({"synth", "--out", dir.string(), "--rule", rule, "--n", "24", "--classes",
                      "3", "--min-len", "1", "--max-len", "3", "--audio-dim", "3",
                      "--video-dim", "2", "--vocab-size", "6", "--seed", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  return (dir / "manifest.tsv").string();
}

std::vector<std::string> quick_train(const std::string& manifest, const fs::path& out) {
  return {"train",        "--data",        manifest,      "--out",     out.string(),
          "--hidden-dim", "4",             "--embed-dim", "3",         "--max-epochs",
          "2",            "--runs",        "1",           "--folds",   "3",
          "--batch-size", "8",             "--hops",      "2",         "--quiet"};
}

std::string without_timestamp(const std::string& report) {
  auto j = nlohmann::json::parse(report);
  j["provenance"].erase("generated_at");
  return j.dump();
}

TEST(Cli, BadArgumentsExitWithTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"train", "--bogus"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const auto r = run({"train", "--data", "x.tsv", "--hops", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("hops must be ≥ 1"), std::string::npos) << r.err;
  EXPECT_EQ(run({"train", "--hops", "2"}).code, 2);  // no --data
  EXPECT_EQ(run({"train", "--data", "x.tsv", "--folds", "2"}).code, 2);
  EXPECT_EQ(run({"gradcheck", "--model", "cnn"}).code, 2);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("gradcheck"), std::string::npos);
}

TEST(Cli, MissingDataFileIsAnError) {
  const auto dir = testing::scratch_dir("cli_missing");
  const auto r = run(quick_train((dir / "absent.tsv").string(), dir / "out"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("absent.tsv"), std::string::npos) << r.err;
}

TEST(Cli, SynthIsReproducible) {
  const auto dir = testing::scratch_dir("cli_synth");
  const auto m1 = synth_corpus(dir / "a");
  const auto m2 = synth_corpus(dir / "b");
  EXPECT_EQ(read_file(m1), read_file(m2));
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir / "a");
    EXPECT_EQ(read_file(entry.path().string()), read_file((dir / "b" / rel).string()))
        << rel;
  }
  EXPECT_TRUE(fs::exists(dir / "a" / "labels.txt"));
  EXPECT_TRUE(fs::exists(dir / "a" / "corpus.cfg"));
}

TEST(Cli, SynthSummaryDescribesTheRule) {
  const auto dir = testing::scratch_dir("cli_synth_sum");
  const auto r = run({"synth", "--out", dir.string(), "--n", "8", "--rule", "xor3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("independent of the label"), std::string::npos);
  EXPECT_NE(r.out.find("class counts:"), std::string::npos);
}

TEST(Cli, TrainIsDeterministicAndWritesReports) {
  const auto dir = testing::scratch_dir("cli_train");
  const auto manifest = synth_corpus(dir / "corpus");
  ASSERT_EQ(run(quick_train(manifest, dir / "r1")).code, 0);
  const auto r = run(quick_train(manifest, dir / "r2"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(without_timestamp(read_file((dir / "r1" / "report.json").string())),
            without_timestamp(read_file((dir / "r2" / "report.json").string())));
  EXPECT_EQ(read_file((dir / "r1" / "confusion.csv").string()),
            read_file((dir / "r2" / "confusion.csv").string()));
  const std::string text = read_file((dir / "r1" / "report.txt").string());
  EXPECT_NE(text.find("across run seeds"), std::string::npos);
  for (int f = 0; f < 3; ++f) {
    EXPECT_TRUE(fs::exists(dir / "r1" / "checkpoints" / ("fold" + std::to_string(f) + ".amh")));
  }
  const auto j = nlohmann::json::parse(read_file((dir / "r1" / "report.json").string()));
  EXPECT_EQ(j["config"]["audio_dim"], 3);  // taken from corpus.cfg
  EXPECT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["provenance"]["manifest_hash"], git_blob_hash(read_file(manifest)));
}

TEST(Cli, CommandLineOverridesConfigFile) {
  const auto dir = testing::scratch_dir("cli_config");
  const auto manifest = synth_corpus(dir / "corpus");
  write_file_atomic((dir / "run.cfg").string(),
                    "# quick settings\nhidden_dim = 5\nhops=4\nmax-epochs=1\n");
  auto args = quick_train(manifest, dir / "out");
  args.push_back("--config");
  args.push_back((dir / "run.cfg").string());
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file((dir / "out" / "report.json").string()));
  EXPECT_EQ(j["config"]["hidden_dim"], 4);  // flag beats file
  EXPECT_EQ(j["config"]["hops"], 2);
  EXPECT_EQ(j["runs"][0]["epochs_run"], 2);

  write_file_atomic((dir / "bad.cfg").string(), "colour=blue\n");
  EXPECT_EQ(run({"train", "--data", manifest, "--config", (dir / "bad.cfg").string()}).code, 2);
}

TEST(Cli, ConfigFileFillsUnsetFlags) {
  const auto dir = testing::scratch_dir("cli_config_fill");
  const auto manifest = synth_corpus(dir / "corpus");
  write_file_atomic((dir / "run.cfg").string(),
                    "[train]\nhidden_dim=5\nembed_dim=3\nmax_epochs=1\nruns=1\nfolds=3\n"
                    "quiet=true\nmodel=\"mdre\"\n");
  const auto r = run({"train", "--data", manifest, "--out", (dir / "out").string(), "--config",
                      (dir / "run.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file((dir / "out" / "report.json").string()));
  EXPECT_EQ(j["config"]["hidden_dim"], 5);
  EXPECT_EQ(j["config"]["model"], "mdre");
}

TEST(Cli, GradcheckPassesAndCatchesInjectedFault) {
  auto ok = run({"gradcheck", "--model", "amh", "--hops", "3", "--hidden-dim", "6"});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("attn.W_V"), std::string::npos);
  ok = run({"gradcheck", "--model", "amh", "--hops", "7", "--hidden-dim", "6"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  ok = run({"gradcheck", "--model", "mdre", "--hidden-dim", "6"});
  EXPECT_EQ(ok.code, 0) << ok.out;

  const auto bad =
      run({"gradcheck", "--model", "amh", "--hops", "3", "--hidden-dim", "6", "--inject-fault"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("attn.W_V"), std::string::npos) << bad.err;
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
}

TEST(Cli, SweepEvalAndInspect) {
  const auto dir = testing::scratch_dir("cli_sweep");
  const auto manifest = synth_corpus(dir / "corpus");
  auto args = quick_train(manifest, dir / "sweep");
  args[0] = "sweep";
  args[args.size() - 2] = "1..2";
  const auto s = run(args);
  ASSERT_EQ(s.code, 0) << s.err;
  const std::string csv = read_file((dir / "sweep" / "sweep.csv").string());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(read_file((dir / "sweep" / "sweep.txt").string()).find("AMH-2"), std::string::npos);

  ASSERT_EQ(run(quick_train(manifest, dir / "train")).code, 0);
  const std::string ckpt = (dir / "train" / "checkpoints" / "fold0.amh").string();
  const auto e = run({"eval", "--checkpoint", ckpt, "--data", manifest});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.out.rfind("samples 24", 0), 0u) << e.out;
  EXPECT_NE(e.out.find("true\\pred,class0,class1,class2"), std::string::npos);

  const auto i = run({"inspect-attention", "--checkpoint", ckpt, "--data", manifest, "--id",
                      "s02", "--id", "s05"});
  ASSERT_EQ(i.code, 0) << i.err;
  const auto j = nlohmann::json::parse(i.out);
  EXPECT_EQ(j["hops"], 2);
  EXPECT_EQ(j["schedule"][0]["target"], "V");
  EXPECT_EQ(j["schedule"][1]["target"], "A");
  const auto& trace = j["samples"]["s02"]["trace"];
  ASSERT_EQ(trace.size(), 2u);
  double sum = 0.0;
  for (double w : trace["1"]) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(run({"inspect-attention", "--checkpoint", ckpt, "--data", manifest, "--id", "nope"})
                .code,
            1);
}

}  // namespace
}  // namespace amh
