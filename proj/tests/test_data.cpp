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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "amh/data.hpp"
#include "amh/error.hpp"
#include "amh/io.hpp"
#include "amh/probe.hpp"
#include "amh/synthetic.hpp"
#include "fixtures.hpp"

namespace amh {
namespace {

namespace fs = std::filesystem;

SyntheticSpec small_spec(SyntheticRule rule, std::size_t n = 40, double noise = 0.1) {
  SyntheticSpec s;
  s.n_samples = n;
  s.rule = rule;
  s.noise = noise;
  s.audio_dim = 3;
  s.video_dim = 2;
  s.vocab_size = 8;
  s.num_classes = 4;
  s.min_length = 1;
  s.max_length = 5;
  return s;
}

CorpusFormat format_of(const SyntheticSpec& s) {
  return {s.audio_dim, s.video_dim, s.vocab_size, LabelSet::numbered(s.num_classes)};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// A one-row corpus with hand-written feature files.
fs::path handmade_corpus(const std::string& name, const std::string& audio,
                         const std::string& label = "happy") {
  const auto dir = testing::scratch_dir(name);
  write_text(dir / "a.csv", audio);
  write_text(dir / "t.txt", "3 1 4\n");
  write_text(dir / "v.csv", "1,2\n3,4\n");
  write_text(dir / "manifest.tsv", std::string(kManifestHeader) + "\nu1\t" + label +
                                       "\ta.csv\tt.txt\tv.csv\n");
  return dir / "manifest.tsv";
}

CorpusFormat handmade_format() { return {3, 2, 10, LabelSet::emotions()}; }

TEST(Corpus, HandmadeFilesLoad) {
  const auto manifest = handmade_corpus("hand", "0.5,1,2\n-1,0,3e-2\n");
  const auto corpus = load_corpus(manifest.string(), handmade_format());
  ASSERT_EQ(corpus.size(), 1u);
  const auto& s = corpus[0];
  EXPECT_EQ(s.id, "u1");
  EXPECT_EQ(s.label, 2u);
  EXPECT_EQ(s.audio.length, 2u);
  EXPECT_EQ(s.audio.features.to_vector(), (std::vector<double>{0.5, 1, 2, -1, 0, 0.03}));
  EXPECT_EQ(s.text.tokens, (std::vector<std::size_t>{3, 1, 4}));
  EXPECT_EQ(s.text.length, 3u);
  EXPECT_EQ(s.video.length, 2u);
}

TEST(Corpus, WrongFeatureWidthNamesFileAndWidth) {
  const auto manifest = handmade_corpus("width", "1,2\n");
  try {
    load_corpus(manifest.string(), handmade_format());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("a.csv"), std::string::npos) << msg;
    EXPECT_NE(msg.find('2'), std::string::npos) << msg;
  }
}

TEST(Corpus, RaggedRowsAreRejected) {
  const auto manifest = handmade_corpus("ragged", "1,2,3\n4,5\n");
  EXPECT_THROW(load_corpus(manifest.string(), handmade_format()), DataError);
}

TEST(Corpus, UnknownLabelIsRejected) {
  const auto manifest = handmade_corpus("label", "1,2,3\n", "bored");
  EXPECT_THROW(load_corpus(manifest.string(), handmade_format()), DataError);
}

TEST(Corpus, MissingFilesAreRejected) {
  const auto manifest = handmade_corpus("missing", "1,2,3\n");
  fs::remove(manifest.parent_path() / "v.csv");
  EXPECT_THROW(load_corpus(manifest.string(), handmade_format()), DataError);
  EXPECT_THROW(load_corpus((manifest.parent_path() / "nope.tsv").string(), handmade_format()),
               DataError);
}

TEST(Corpus, TokenBeyondVocabIsRejected) {
  const auto manifest = handmade_corpus("vocab", "1,2,3\n");
  CorpusFormat f = handmade_format();
  f.vocab_size = 4;
  EXPECT_THROW(load_corpus(manifest.string(), f), DataError);
}

TEST(Corpus, BadHeaderIsRejected) {
  const auto manifest = handmade_corpus("header", "1,2,3\n");
  write_text(manifest, "id\tlabel\n");
  EXPECT_THROW(load_corpus(manifest.string(), handmade_format()), DataError);
}

TEST(Corpus, WriteThenLoadRoundTrips) {
  const auto spec = small_spec(SyntheticRule::Xor3, 12);
  const auto samples = generate_synthetic(spec);
  const auto dir = testing::scratch_dir("roundtrip");
  const auto labels = LabelSet::numbered(spec.num_classes);
  const std::string manifest = write_corpus(dir.string(), samples, labels);
  EXPECT_EQ(load_label_set(manifest), labels);
  const auto back = load_corpus(manifest, format_of(spec));
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(back[i].id, samples[i].id);
    EXPECT_EQ(back[i].label, samples[i].label);
    EXPECT_EQ(back[i].text.tokens, samples[i].text.tokens);
    EXPECT_EQ(back[i].audio.features.to_vector(), samples[i].audio.features.to_vector());
    EXPECT_EQ(back[i].video.features.to_vector(), samples[i].video.features.to_vector());
  }
}

TEST(Corpus, MissingLabelsFileMeansEmotions) {
  const auto manifest = handmade_corpus("emotions", "1,2,3\n");
  EXPECT_EQ(load_label_set(manifest.string()), LabelSet::emotions());
}

std::vector<std::string> numbered_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("utt" + std::to_string(i));
  return ids;
}

TEST(Folds, PartitionOfRealisticCorpus) {
  const auto ids = numbered_ids(7487);
  const auto folds = make_folds(ids, 10, 0);
  ASSERT_EQ(folds.size(), 10u);
  std::multiset<std::string> tested;
  for (std::size_t k = 0; k < 10; ++k) {
    const auto& f = folds[k];
    EXPECT_TRUE(f.test.size() == 748 || f.test.size() == 749) << f.test.size();
    EXPECT_EQ(f.train.size() + f.dev.size() + f.test.size(), 7487u);
    EXPECT_EQ(f.dev, folds[(k + 1) % 10].test);
    std::set<std::string> all(f.train.begin(), f.train.end());
    all.insert(f.dev.begin(), f.dev.end());
    all.insert(f.test.begin(), f.test.end());
    EXPECT_EQ(all.size(), 7487u);
    tested.insert(f.test.begin(), f.test.end());
  }
  EXPECT_EQ(tested.size(), 7487u);
  EXPECT_EQ(std::set<std::string>(tested.begin(), tested.end()).size(), 7487u);
}

TEST(Folds, SeededAndDeterministic) {
  const auto ids = numbered_ids(50);
  const auto a = make_folds(ids, 5, 3);
  const auto b = make_folds(ids, 5, 3);
  const auto c = make_folds(ids, 5, 4);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(a[k].test, b[k].test);
  EXPECT_NE(a[0].test, c[0].test);
}

TEST(Folds, TooFewFoldsOrIds) {
  EXPECT_THROW(make_folds(numbered_ids(10), 2, 0), ConfigError);
  EXPECT_THROW(make_folds(numbered_ids(2), 3, 0), ConfigError);
}

TEST(Synthetic, SameSeedSameCorpus) {
  auto spec = small_spec(SyntheticRule::Xor3, 20);
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].audio.features.to_vector(), b[i].audio.features.to_vector());
    EXPECT_EQ(a[i].text.tokens, b[i].text.tokens);
    EXPECT_EQ(a[i].label, b[i].label);
  }
  spec.seed = 1;
  const auto c = generate_synthetic(spec);
  EXPECT_NE(a[0].audio.features.to_vector(), c[0].audio.features.to_vector());
}

TEST(Synthetic, ShapesAndLengths) {
  const auto spec = small_spec(SyntheticRule::Copy, 30);
  for (const auto& s : generate_synthetic(spec)) {
    EXPECT_GE(s.audio.length, 1u);
    EXPECT_LE(s.audio.length, 5u);
    EXPECT_EQ(s.audio.rows(), s.audio.length);
    EXPECT_EQ(s.audio.feature_dim(), 3u);
    EXPECT_EQ(s.video.feature_dim(), 2u);
    EXPECT_EQ(s.text.tokens.size(), s.text.length);
    for (auto t : s.text.tokens) EXPECT_LT(t, 8u);
    EXPECT_LT(s.label, 4u);
  }
}

TEST(Synthetic, RulesRelateCodesToLabels) {
  for (SyntheticRule rule : {SyntheticRule::Copy, SyntheticRule::Xor3}) {
    const auto spec = small_spec(rule, 100);
    const auto samples = generate_synthetic(spec);
    const auto codes = synthetic_codes(spec);
    ASSERT_EQ(codes.size(), samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& c = codes[i];
      if (rule == SyntheticRule::Copy) {
        EXPECT_EQ(c.audio, samples[i].label);
        EXPECT_EQ(c.text, samples[i].label);
        EXPECT_EQ(c.video, samples[i].label);
      } else {
        EXPECT_EQ((c.audio + c.text + c.video) % 4, samples[i].label);
      }
    }
  }
}

TEST(Synthetic, NoiselessTextIsTheCleanToken) {
  auto spec = small_spec(SyntheticRule::Copy, 40, 0.0);
  for (const auto& s : generate_synthetic(spec)) {
    for (auto t : s.text.tokens) EXPECT_EQ(t / 2, s.label);  // synonyms per class = 8 / 4
  }
}

TEST(Synthetic, InvalidSpecs) {
  auto s = small_spec(SyntheticRule::Copy);
  s.vocab_size = 3;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_spec(SyntheticRule::Copy);
  s.min_length = 6;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_spec(SyntheticRule::Copy);
  s.noise = -1;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(rule_from_name("and"), ConfigError);
}

double probe_accuracy(SyntheticRule rule, std::vector<Modality> mods) {
  SyntheticSpec spec = small_spec(rule, 600, 0.1);
  spec.audio_dim = spec.video_dim = 8;
  spec.vocab_size = 16;
  const auto data = generate_synthetic(spec);
  std::span<const MultimodalSample> all(data);
  ProbeConfig pc;
  pc.vocab_size = 16;
  return train_probe(all.first(400), all.subspan(400), mods, 4, pc).wa;
}

TEST(Synthetic, CopyIsLinearlyDecodableFromOneModality) {
  EXPECT_GT(probe_accuracy(SyntheticRule::Copy, {Modality::Audio}), 0.95);
  EXPECT_GT(probe_accuracy(SyntheticRule::Copy, {Modality::Text}), 0.95);
}

TEST(Synthetic, Xor3HidesTheLabelFromPairs) {
  const double chance = 0.25;
  EXPECT_LE(probe_accuracy(SyntheticRule::Xor3, {Modality::Audio}), chance + 0.1);
  EXPECT_LE(probe_accuracy(SyntheticRule::Xor3, {Modality::Audio, Modality::Video}),
            chance + 0.1);
  EXPECT_LE(probe_accuracy(SyntheticRule::Xor3, {Modality::Text, Modality::Video}),
            chance + 0.1);
}

}  // namespace
}  // namespace amh
