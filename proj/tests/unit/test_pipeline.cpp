// Copyright 2026 The VTLayout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "vtlayout/common/error.hpp"
#include "vtlayout/dvfe/tensor_file.hpp"
#include "vtlayout/pipeline/config.hpp"
#include "vtlayout/pipeline/feature_cache.hpp"
#include "vtlayout/pipeline/pipeline.hpp"

namespace vtlayout {
namespace {

namespace fs = std::filesystem;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInput;
}

fs::path FreshDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vtlayout_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

PipelineConfig SmallConfig(int pages = 10) {
  PipelineConfig c;
  c.corpus.pages = pages;
  c.dvfe.pretrain_epochs = 0;
  c.train.epochs = 40;
  c.train.batch_size = 16;
  c.workers = 1;
  return c;
}

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto bytes = ReadFileBytes(e.path());
    out[fs::relative(e.path(), root).string()] = std::string(bytes.begin(), bytes.end());
  }
  return out;
}

// ---- configuration ----

TEST(Config, DefaultsAndOverrides) {
  const auto d = ParseConfig("{}");
  EXPECT_EQ(d.seed, 1u);
  EXPECT_EQ(d.train.mask, "D+S+T");
  EXPECT_EQ(d.train.epochs, 20);
  EXPECT_EQ(d.train.batch_size, 64);
  EXPECT_EQ(d.dvfe.se_ratio, 16);
  EXPECT_EQ(d.tfe.upscale_factor, 8);
  EXPECT_EQ(d.eval.match_threshold, 0.5);
  const auto c = ParseConfig(R"({"train": {"epochs": 3}, "corpus": {"pages": 7}})",
                             {"train.mask=S+T", "eval.unmatched=strict", "corpus.pages=9"});
  EXPECT_EQ(c.train.epochs, 3);
  EXPECT_EQ(c.train.mask, "S+T");
  EXPECT_EQ(c.eval.unmatched, "strict");
  EXPECT_EQ(c.corpus.pages, 9);
  EXPECT_EQ(ConfigWithOverrides(d, {"seed=5"}).seed, 5u);
  const auto round = ParseConfig(ConfigToJson(c));
  EXPECT_EQ(ConfigToJson(round), ConfigToJson(c));
}

TEST(Config, RejectsUnknownKeysTypesAndDomains) {
  EXPECT_EQ(KindOf([] { ParseConfig(R"({"train": {"epoch": 3}})"); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { ParseConfig("{}", {"bogus.key=1"}); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { ParseConfig(R"({"train": {"epochs": "many"}})"); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { ParseConfig("{}", {"train.epochs"}); }), ErrorKind::kConfiguration);
  EXPECT_THROW(ParseConfig("{\"train\": "), FormatError);
  for (const char* bad : {"train.batch_size=0", "train.lr=-1", "eval.match_threshold=1.5", "corpus.pages=0",
                          "train.mask=X", "dvfe.backbone=vgg", "localizer.kind=yolo", "eval.unmatched=lenient"}) {
    EXPECT_EQ(KindOf([&] { ValidateConfig(ParseConfig("{}", {bad})); }), ErrorKind::kConfiguration) << bad;
  }
  ValidateConfig(ParseConfig("{}"));
  EXPECT_EQ(KindOf([] { LoadConfig("/nonexistent/config.json"); }), ErrorKind::kConfiguration);
}

TEST(Config, FingerprintIgnoresLocationsAndWorkers) {
  const auto base = ParseConfig("{}");
  const auto fp = ConfigFingerprint(base);
  EXPECT_EQ(ConfigFingerprint(ParseConfig("{}")), fp);
  EXPECT_EQ(ConfigFingerprint(ConfigWithOverrides(base, {"cache_dir=/tmp/x", "workers=3", "corpus.path=/tmp/elsewhere"})), fp);
  EXPECT_NE(ConfigFingerprint(ConfigWithOverrides(base, {"train.lr=0.01"})), fp);
  const auto other = ConfigWithOverrides(base, {"train.lr=0.01"});
  EXPECT_EQ(SectionFingerprint(other, {"svfe"}), SectionFingerprint(base, {"svfe"}));
  EXPECT_NE(SectionFingerprint(other, {"train"}), SectionFingerprint(base, {"train"}));
  EXPECT_EQ(KindOf([&] { SectionFingerprint(base, {"nope"}); }), ErrorKind::kConfiguration);
}

TEST(Config, SubSeedsFollowTheGlobalSeedUnlessPinned) {
  const auto a = ParseConfig("{}", {"seed=1"});
  const auto b = ParseConfig("{}", {"seed=2"});
  EXPECT_NE(TrainSeed(a), TrainSeed(b));
  EXPECT_NE(TrainSeed(a), LocalizerSeed(a));
  EXPECT_NE(TrainSeed(a), BackboneSeed(a));
  EXPECT_EQ(TrainSeed(ParseConfig("{}", {"seed=1", "train.seed=42"})), 42u);
  EXPECT_EQ(TrainSeed(ParseConfig("{}", {"seed=2", "train.seed=42"})), 42u);
}

// ---- feature records ----

TEST(Cache, RecordRoundTripAndDamage) {
  FeatureRecord dense{"abc", 4, false, {1.0f, -2.5f, 0.0f, 3.25f}, {}};
  FeatureRecord sparse{"def", 4096, true, {0.5f, 0.25f}, {3, 4000}};
  for (const auto& r : {dense, sparse}) {
    const auto bytes = EncodeFeatureRecord(r);
    EXPECT_EQ(DecodeFeatureRecord(bytes), r);
    auto cut = bytes;
    cut.pop_back();
    EXPECT_EQ(KindOf([&] { DecodeFeatureRecord(cut); }), ErrorKind::kIntegrity);
    auto flip = bytes;
    flip[flip.size() - 3] ^= 1;
    EXPECT_EQ(KindOf([&] { DecodeFeatureRecord(flip); }), ErrorKind::kIntegrity);
  }
}

TEST(Cache, StoreLoadMissAndStaleness) {
  const fs::path root = FreshDir("cache");
  const FeatureCache cache(root);
  const FeatureRecord r{"fp1", 2, false, {1.0f, 2.0f}, {}};
  EXPECT_FALSE(cache.Load("svfe", "fp1", "k").has_value());
  cache.Store("svfe", "k", r);
  EXPECT_TRUE(cache.Contains("svfe", "fp1", "k"));
  EXPECT_EQ(*cache.Load("svfe", "fp1", "k"), r);
  EXPECT_FALSE(cache.Load("svfe", "fp2", "k").has_value());
  EXPECT_FALSE(cache.Load("dvfe", "fp1", "k").has_value());
  // A record moved under another fingerprint is stale.
  const auto stale = cache.PathFor("svfe", "fp2", "k");
  fs::create_directories(stale.parent_path());
  fs::copy_file(cache.PathFor("svfe", "fp1", "k"), stale);
  EXPECT_FALSE(cache.Load("svfe", "fp2", "k").has_value());
  // So is a damaged one.
  std::ofstream(cache.PathFor("svfe", "fp1", "k"), std::ios::binary) << "junk";
  EXPECT_FALSE(cache.Load("svfe", "fp1", "k").has_value());
  EXPECT_EQ(cache.CountRecords(), 2);
  fs::remove_all(root);
}

// ---- extraction ----

class ExtractionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = SmallConfig();
    splits_ = LoadCorpus(config_);
  }
  PipelineConfig config_;
  CorpusSplits splits_;
};

TEST_F(ExtractionTest, OneRecordPerBlockAndExtractor) {
  const fs::path root = FreshDir("extract_full");
  const FeatureCache cache(root);
  const FeatureSpace space(config_, FullMask(), splits_.train, cache);
  const auto& blocks = splits_.train.annotations();
  const auto n = static_cast<std::int64_t>(blocks.size());
  ASSERT_GT(n, 50);
  const auto first = space.Extract(splits_.train, blocks);
  EXPECT_EQ(first.computed, 3 * n);
  EXPECT_EQ(first.cached, 0);
  EXPECT_EQ(cache.CountRecords(), 3 * n);
  const auto second = space.Extract(splits_.train, blocks);
  EXPECT_EQ(second.computed, 0);
  EXPECT_EQ(second.cached, 3 * n);
  const auto set = space.Bundles(splits_.train, blocks);
  ASSERT_EQ(set.bundles.size(), blocks.size());
  for (const auto& b : set.bundles) {
    EXPECT_EQ(b.deep->size(), static_cast<std::size_t>(space.deep_channels()));
    EXPECT_EQ(b.shallow->size(), 256u);
    EXPECT_EQ(b.text->dim, space.vocab_size());
    EXPECT_TRUE(b.label.has_value());
  }

  const fs::path shallow_root = FreshDir("extract_svfe");
  const FeatureCache shallow_cache(shallow_root);
  const FeatureSpace shallow(config_, AblationMask::Parse("S"), splits_.train, shallow_cache);
  EXPECT_EQ(shallow.Extract(splits_.train, blocks).computed, n);
  EXPECT_EQ(shallow_cache.CountRecords(), n);
  EXPECT_EQ(shallow.backbone(), nullptr);
  EXPECT_EQ(shallow.vocabulary(), nullptr);
  fs::remove_all(root);
  fs::remove_all(shallow_root);
}

TEST_F(ExtractionTest, InterruptedRunResumesToTheSameCache) {
  const fs::path whole = FreshDir("resume_whole"), parts = FreshDir("resume_parts");
  const auto& blocks = splits_.train.annotations();
  const auto total = 3 * static_cast<std::int64_t>(blocks.size());
  {
    const FeatureCache cache(whole);
    FeatureSpace(config_, FullMask(), splits_.train, cache).Extract(splits_.train, blocks);
  }
  const FeatureCache cache(parts);
  const FeatureSpace space(config_, FullMask(), splits_.train, cache);
  ExtractOptions stop_half;
  stop_half.stop = [&](const ExtractionStats& s) { return s.computed * 2 >= total; };
  const auto partial = space.Extract(splits_.train, blocks, stop_half);
  EXPECT_TRUE(partial.interrupted);
  EXPECT_GE(partial.computed * 2, total);
  EXPECT_LT(partial.computed, total);
  const auto resumed = space.Extract(splits_.train, blocks);
  EXPECT_FALSE(resumed.interrupted);
  EXPECT_EQ(resumed.cached, partial.computed);
  EXPECT_EQ(resumed.cached + resumed.computed, total);
  EXPECT_EQ(Snapshot(parts), Snapshot(whole));
  fs::remove_all(whole);
  fs::remove_all(parts);
}

TEST_F(ExtractionTest, MissWithoutComputeListsTheGaps) {
  const fs::path root = FreshDir("miss");
  const FeatureCache cache(root);
  const FeatureSpace space(config_, AblationMask::Parse("S+T"), splits_.train, cache);
  ExtractOptions no_compute;
  no_compute.compute = false;
  try {
    space.Bundles(splits_.train, splits_.train.annotations(), nullptr, no_compute);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_NE(std::string(e.what()).find("svfe"), std::string::npos);
  }
  fs::remove_all(root);
}

TEST_F(ExtractionTest, FingerprintsTrackRelevantSettings) {
  const fs::path root = FreshDir("fps");
  const FeatureCache cache(root);
  const FeatureSpace a(config_, FullMask(), splits_.train, cache);
  const FeatureSpace b(ConfigWithOverrides(config_, {"train.lr=0.5"}), FullMask(), splits_.train, cache);
  const FeatureSpace c(ConfigWithOverrides(config_, {"svfe.normalize=false"}), FullMask(), splits_.train, cache);
  EXPECT_EQ(a.Fingerprints(), b.Fingerprints());
  EXPECT_NE(a.Fingerprint(Extractor::kShallow), c.Fingerprint(Extractor::kShallow));
  EXPECT_EQ(a.Fingerprint(Extractor::kDeep), c.Fingerprint(Extractor::kDeep));
  fs::remove_all(root);
}

// ---- training and evaluation ----

TEST_F(ExtractionTest, GroundTruthBoxesOnTheTrainingSetAreMemorized) {
  const fs::path root = FreshDir("memorize");
  const FeatureCache cache(root);
  const FeatureSpace space(config_, FullMask(), splits_.train, cache);
  const auto trained = TrainOnCorpus(config_, space, splits_.train, FullMask());
  const auto localizer = MakeLocalizer(config_, splits_.train);
  const auto result = EvaluateOnCorpus(config_, space, trained.model, splits_.train, *localizer);
  EXPECT_EQ(result.report.macro_f1, 1.0);
  EXPECT_EQ(result.pairs.size(), splits_.train.annotations().size());
  const auto again = TrainOnCorpus(config_, space, splits_.train, FullMask());
  EXPECT_EQ(again.trace.epoch_loss, trained.trace.epoch_loss);

  const auto recomputed = Prf(result.report.confusion, result.report.policy);
  EXPECT_EQ(recomputed.per_category, result.report.per_category);
  EXPECT_EQ(recomputed.macro_f1, result.report.macro_f1);

  const FeatureSpace other(config_, AblationMask::Parse("S"), splits_.train, cache);
  EXPECT_EQ(KindOf([&] { EvaluateOnCorpus(config_, other, trained.model, splits_.val, *localizer); }),
            ErrorKind::kCompatibility);
  fs::remove_all(root);
}

TEST_F(ExtractionTest, PerturbedLocalizerLeavesUnmatchedBlocks) {
  const fs::path root = FreshDir("perturbed");
  const FeatureCache cache(root);
  auto cfg = ConfigWithOverrides(config_, {"train.mask=S+T", "localizer.kind=perturbed", "localizer.jitter=3",
                                           "localizer.drop_rate=0.1"});
  const AblationMask mask = AblationMask::Parse(cfg.train.mask);
  const FeatureSpace space(cfg, mask, splits_.train, cache);
  const auto trained = TrainOnCorpus(cfg, space, splits_.train, mask);
  const auto localizer = MakeLocalizer(cfg, splits_.val);
  const auto result = EvaluateOnCorpus(cfg, space, trained.model, splits_.val, *localizer);
  std::int64_t missed = 0;
  for (auto v : result.report.confusion.unmatched_gt) missed += v;
  EXPECT_GT(missed, 0);
  EXPECT_GT(result.report.confusion.matched(), 0);
  fs::remove_all(root);
}

TEST(Corpora, SyntheticSplitsAndMerge) {
  const auto s = LoadCorpus(SmallConfig(10));
  EXPECT_EQ(s.full.pages().size(), 10u);
  EXPECT_EQ(s.val.pages().size(), 2u);
  EXPECT_EQ(s.train.pages().size(), 8u);
  const Corpus merged = MergeCorpora(s.train, s.val);
  EXPECT_EQ(merged.annotations().size(), s.full.annotations().size());
  EXPECT_EQ(KindOf([&] { MergeCorpora(s.train, s.train); }), ErrorKind::kIntegrity);
  EXPECT_EQ(LoadCorpus(SmallConfig(10)).full.annotations(), s.full.annotations());
}

TEST(Trace, JsonNamesTheFingerprint) {
  TrainResult t;
  t.epoch_loss = {1.5, 0.25};
  const std::string j = TraceToJson(t, "feedbeef");
  EXPECT_NE(j.find("feedbeef"), std::string::npos);
  EXPECT_NE(j.find("0.25"), std::string::npos);
}

}  // namespace
}  // namespace vtlayout
