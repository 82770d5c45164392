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

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "vtlayout/common/error.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/evaluation/experiments.hpp"
#include "vtlayout/evaluation/metrics.hpp"
#include "vtlayout/evaluation/report.hpp"

namespace vtlayout {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInput;
}

Category Cat(int c) { return static_cast<Category>(c); }

ConfusionMatrix RandomMatrix(Rng& rng, bool with_unmatched) {
  ConfusionMatrix m;
  const int scale = rng.UniformInt(0, 3) == 0 ? 3 : 60;
  for (auto& row : m.counts)
    for (auto& v : row) v = rng.Bernoulli(0.3) ? 0 : rng.UniformInt(0, scale);
  if (with_unmatched) {
    for (auto& v : m.unmatched_gt) v = rng.UniformInt(0, 5);
    for (auto& v : m.unmatched_pred) v = rng.UniformInt(0, 5);
  }
  return m;
}

// ---- confusion and scores ----

TEST(Confusion, PerfectAndAllWrong) {
  std::vector<ClassifiedPair> perfect, wrong;
  for (int c = 0; c < kNumCategories; ++c) {
    for (int k = 0; k < 3; ++k) {
      perfect.push_back({Cat(c), Cat(c)});
      wrong.push_back({Cat(c), Cat((c + 1) % kNumCategories)});
    }
  }
  const auto rp = Prf(Confusion(perfect));
  EXPECT_EQ(rp.macro_f1, 1.0);
  for (const auto& m : rp.per_category) EXPECT_EQ(m.tp, 3);
  const auto rw = Prf(Confusion(wrong));
  EXPECT_EQ(rw.macro_f1, 0.0);
  for (const auto& m : rw.per_category) {
    EXPECT_EQ(m.fp, 3);
    EXPECT_EQ(m.fn, 3);
  }
}

TEST(Confusion, HandTally) {
  const std::vector<ClassifiedPair> pairs = {
      {Category::kText, Category::kText},   {Category::kText, Category::kText},   {Category::kText, Category::kTitle},
      {Category::kTitle, Category::kTitle}, {Category::kList, Category::kText},   {Category::kFigure, Category::kFigure},
      {Category::kTable, Category::kFigure}, {Category::kTable, Category::kTable}, {Category::kList, std::nullopt},
      {std::nullopt, Category::kTable}};
  const auto m = Confusion(pairs);
  EXPECT_EQ(m.counts[0][0], 2);
  EXPECT_EQ(m.counts[0][1], 1);
  EXPECT_EQ(m.counts[2][0], 1);
  EXPECT_EQ(m.counts[4][3], 1);
  EXPECT_EQ(m.unmatched_gt[2], 1);
  EXPECT_EQ(m.unmatched_pred[4], 1);
  EXPECT_EQ(m.matched(), 8);
  EXPECT_EQ(oracle::ExpandPairs(m).size(), pairs.size());
  const auto r = Prf(m);
  // Text: tp 2, fp 1 (a list), fn 1 (a title).
  EXPECT_EQ(r.per_category[0].tp, 2);
  EXPECT_EQ(r.per_category[0].fp, 1);
  EXPECT_EQ(r.per_category[0].fn, 1);
  EXPECT_DOUBLE_EQ(r.per_category[0].f1, 2.0 / 3.0);
  // List: never predicted, one confused and one missed.
  EXPECT_EQ(r.per_category[2].fn, 2);
  EXPECT_TRUE(r.per_category[2].precision_undefined);
  EXPECT_EQ(r.per_category[2].f1, 0.0);
  // Table: one hit, one miss, one spurious prediction.
  EXPECT_DOUBLE_EQ(r.per_category[4].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.per_category[4].recall, 0.5);
}

TEST(Prf, TwoClassHandValues) {
  ConfusionMatrix m;
  m.counts[0][0] = 3;
  m.counts[0][1] = 1;
  m.counts[1][0] = 2;
  m.counts[1][1] = 4;
  const auto r = Prf(m);
  EXPECT_DOUBLE_EQ(r.per_category[0].precision, 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.per_category[0].recall, 3.0 / 4.0);
  EXPECT_NEAR(r.per_category[0].f1, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.per_category[1].precision, 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.per_category[1].recall, 4.0 / 6.0);
  EXPECT_NEAR(r.per_category[1].f1, 8.0 / 11.0, 1e-15);
  EXPECT_TRUE(r.per_category[3].recall_undefined);
  EXPECT_NEAR(r.macro_f1, (2.0 / 3.0 + 8.0 / 11.0) / 5.0, 1e-15);
}

TEST(Prf, SingleClassAllCorrect) {
  ConfusionMatrix m;
  m.counts[3][3] = 10;
  const auto r = Prf(m);
  EXPECT_EQ(r.per_category[3].f1, 1.0);
  EXPECT_NEAR(r.macro_f1, 0.2, 1e-15);
}

TEST(Prf, MatchesBruteForceOnRandomMatrices) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto m = RandomMatrix(rng, t % 2 == 0);
    const auto pairs = oracle::ExpandPairs(m);
    EXPECT_EQ(Confusion(pairs), m);
    for (const auto policy : {UnmatchedPolicy::kPenalize, UnmatchedPolicy::kStrict}) {
      const auto r = Prf(m, policy);
      const auto b = oracle::BrutePrf(pairs, policy == UnmatchedPolicy::kPenalize);
      for (int c = 0; c < kNumCategories; ++c) {
        ASSERT_EQ(r.per_category[c].tp, b.tp[c]);
        ASSERT_EQ(r.per_category[c].fp, b.fp[c]);
        ASSERT_EQ(r.per_category[c].fn, b.fn[c]);
        ASSERT_EQ(r.per_category[c].precision, b.precision[c]);
        ASSERT_EQ(r.per_category[c].recall, b.recall[c]);
        ASSERT_EQ(r.per_category[c].f1, b.f1[c]);
        // F1 vanishes exactly when there are no true positives.
        ASSERT_EQ(r.per_category[c].f1 == 0.0, r.per_category[c].tp == 0);
        ASSERT_GE(r.per_category[c].f1, 0.0);
        ASSERT_LE(r.per_category[c].f1, 1.0);
      }
      ASSERT_EQ(r.macro_f1, b.macro_f1);
      ASSERT_EQ(r.macro_precision, b.macro_precision);
      ASSERT_EQ(r.macro_recall, b.macro_recall);
    }
  }
}

TEST(Prf, StrictIgnoresUnmatchedBlocks) {
  ConfusionMatrix m;
  m.counts[0][0] = 4;
  m.unmatched_gt[0] = 4;
  m.unmatched_pred[0] = 4;
  EXPECT_EQ(Prf(m, UnmatchedPolicy::kStrict).per_category[0].f1, 1.0);
  EXPECT_DOUBLE_EQ(Prf(m, UnmatchedPolicy::kPenalize).per_category[0].f1, 0.5);
  EXPECT_EQ(ParseUnmatchedPolicy(UnmatchedPolicyName(UnmatchedPolicy::kStrict)), UnmatchedPolicy::kStrict);
  EXPECT_EQ(KindOf([] { ParseUnmatchedPolicy("lenient"); }), ErrorKind::kConfiguration);
}

TEST(Prf, MergeAddsTallies) {
  Rng rng(2);
  const auto a = RandomMatrix(rng, true), b = RandomMatrix(rng, true);
  auto merged = a;
  merged.Merge(b);
  auto pa = oracle::ExpandPairs(a), pb = oracle::ExpandPairs(b);
  pa.insert(pa.end(), pb.begin(), pb.end());
  EXPECT_EQ(merged, Confusion(pa));
}

TEST(Macro, ReferenceColumnAverage) {
  const std::vector<double> column = {0.9751, 0.9411, 0.9177, 0.9824, 0.9833};
  EXPECT_NEAR(MacroAverage(column), 0.9599, 5e-5);
  EXPECT_NEAR(MacroAverage(column), 0.95992, 1e-12);
  EXPECT_EQ(MacroAverage(std::vector<double>{}), 0.0);
}

// ---- ablation ----

TEST(Ablation, OrderAndRunner) {
  const auto order = AblationOrder();
  std::vector<std::string> codes;
  for (const auto& m : order) codes.push_back(m.Code());
  EXPECT_EQ(codes, (std::vector<std::string>{"D+S+T", "D+S", "D+T", "S+T", "D", "T", "S"}));
  std::vector<std::string> seen;
  const auto rows = RunAblation([&](const AblationMask& m) {
    seen.push_back(m.Code());
    EvalReport r;
    r.label = m.Label();
    return r;
  });
  EXPECT_EQ(seen, codes);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[4].report.label, "DVFE");
}

// ---- folds ----

std::vector<BlockAnnotation> Blocks(const std::array<int, kNumCategories>& counts) {
  std::vector<BlockAnnotation> out;
  std::int64_t id = 0;
  for (int c = 0; c < kNumCategories; ++c) {
    for (int k = 0; k < counts[c]; ++k) {
      BlockAnnotation a;
      a.id = id++;
      a.page_id = "p" + std::to_string(id % 17);
      a.bbox = {0, 0, 10, 10};
      a.category = Cat(c);
      out.push_back(a);
    }
  }
  Rng rng(99);
  rng.Shuffle(std::span<BlockAnnotation>(out));
  return out;
}

TEST(Folds, StratifiedExhaustiveDisjointDeterministic) {
  const auto anns = Blocks({103, 41, 27, 12, 9});
  const auto f = StratifiedFolds(anns, 5, 7);
  ASSERT_EQ(f.fold_of.size(), anns.size());
  std::set<std::size_t> all;
  for (int k = 0; k < 5; ++k) {
    const auto test = f.TestIndices(k), train = f.TrainIndices(k);
    EXPECT_EQ(test.size() + train.size(), anns.size());
    std::set<std::size_t> t(test.begin(), test.end());
    for (auto i : train) EXPECT_FALSE(t.count(i));
    for (auto i : test) EXPECT_TRUE(all.insert(i).second);
  }
  EXPECT_EQ(all.size(), anns.size());
  for (int c = 0; c < kNumCategories; ++c) {
    int lo = 1 << 30, hi = 0;
    for (int k = 0; k < 5; ++k) {
      int n = 0;
      for (auto i : f.TestIndices(k)) n += *anns[i].category == Cat(c);
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    EXPECT_LE(hi - lo, 1) << c;
  }
  EXPECT_EQ(StratifiedFolds(anns, 5, 7).fold_of, f.fold_of);
  EXPECT_NE(StratifiedFolds(anns, 5, 8).fold_of, f.fold_of);
}

TEST(Folds, TooFewBlocksOrFolds) {
  EXPECT_EQ(KindOf([] { StratifiedFolds(Blocks({10, 10, 10, 4, 10}), 5, 1); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { StratifiedFolds(Blocks({10, 10, 10, 10, 10}), 1, 1); }), ErrorKind::kConfiguration);
}

TEST(Folds, CrossValidationDrivesEveryFold) {
  const auto anns = Blocks({20, 10, 10, 10, 10});
  std::set<std::string> pages;
  for (const auto& a : anns) pages.insert(a.page_id);
  std::vector<PageInfo> infos;
  for (const auto& p : pages) infos.push_back({p, 100, 100, p + ".png"});
  const Corpus corpus(infos, anns, {}, {}, nullptr);
  std::vector<int> seen;
  const auto result = FiveFoldCv(corpus, 3, [&](int fold, const auto& train, const auto& test) {
    seen.push_back(fold);
    EXPECT_EQ(train.size() + test.size(), anns.size());
    ConfusionMatrix m;
    m.counts[0][0] = fold + 1;
    m.counts[1][1] = 1;
    m.counts[1][0] = fold;
    return Prf(m);
  });
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4}));
  ASSERT_EQ(result.folds.size(), 5u);
  double text = 0, macro = 0;
  for (const auto& r : result.folds) {
    text += r.per_category[0].f1 / 5;
    macro += r.macro_f1 / 5;
  }
  EXPECT_NEAR(result.mean_f1[0], text, 1e-15);
  EXPECT_NEAR(result.mean_macro_f1, macro, 1e-15);
  EXPECT_EQ(result.assignment.fold_of, StratifiedFolds(anns, 5, 3).fold_of);
}

// Reference five-fold table: columns Text, List, Title, Figure, Table, Avg.
const std::vector<std::vector<double>> kFoldTable = {
    {0.9450, 0.9648, 0.9295, 0.9560, 0.9472, 0.9495}, {0.9428, 0.9746, 0.9056, 0.9878, 0.9735, 0.9569},
    {0.9402, 0.9760, 0.9347, 0.9627, 0.9512, 0.9532}, {0.9562, 0.9810, 0.9537, 0.9848, 0.9626, 0.9678},
    {0.9376, 0.9687, 0.9195, 0.9591, 0.9425, 0.9458}};
const std::vector<double> kPrintedAverage = {0.9444, 0.9286, 0.9730, 0.9701, 0.9554, 0.9546};

TEST(Audit, RecomputedFoldMeans) {
  const auto means = FoldMeans(kFoldTable);
  EXPECT_NEAR(means[2], 0.9286, 5e-5);  // Title
  EXPECT_NEAR(means[1], 0.9730, 5e-5);  // List
  EXPECT_NEAR(means[0], 0.9444, 5e-5);
  EXPECT_NEAR(means[5], 0.9546, 5e-5);
  EXPECT_EQ(KindOf([] { FoldMeans({{1, 2}, {1}}); }), ErrorKind::kShape);
}

TEST(Audit, FlagsTheSwappedTitleAndListAverages) {
  const auto audit = AuditFoldAverage(kFoldTable, kPrintedAverage);
  EXPECT_FALSE(audit.consistent());
  EXPECT_EQ(audit.mismatched_columns, (std::vector<int>{1, 2}));
  ASSERT_EQ(audit.transposed_columns.size(), 1u);
  EXPECT_EQ(audit.transposed_columns[0], std::make_pair(1, 2));
  auto fixed = kPrintedAverage;
  std::swap(fixed[1], fixed[2]);
  EXPECT_TRUE(AuditFoldAverage(kFoldTable, fixed).consistent());
  auto off = fixed;
  off[3] += 0.01;
  const auto a = AuditFoldAverage(kFoldTable, off);
  EXPECT_EQ(a.mismatched_columns, std::vector<int>{3});
  EXPECT_TRUE(a.transposed_columns.empty());
}

// ---- small-sample draw ----

Corpus CountsCorpus(const std::array<int, kNumCategories>& counts) {
  const auto anns = Blocks(counts);
  std::set<std::string> pages;
  for (const auto& a : anns) pages.insert(a.page_id);
  std::vector<PageInfo> infos;
  for (const auto& p : pages) infos.push_back({p, 100, 100, p + ".png"});
  return Corpus(infos, anns, {}, {}, nullptr);
}

TEST(SmallSample, ScalesEveryCategoryByTheScarcestShare) {
  const auto c = CountsCorpus({1000, 3000, 2000, 2000, 2000});
  const auto s = SmallDatasetSample(c, 1);
  EXPECT_DOUBLE_EQ(s.scale_factor, 25.0);
  EXPECT_EQ(s.taken, (std::array<std::int64_t, kNumCategories>{1000, 1000, 400, 400, 400}));
  EXPECT_EQ(s.corpus.CategoryCounts(), s.taken);
  const auto again = SmallDatasetSample(c, 1);
  EXPECT_EQ(again.corpus.annotations(), s.corpus.annotations());
  EXPECT_NE(SmallDatasetSample(c, 2).corpus.annotations(), s.corpus.annotations());
}

TEST(SmallSample, ShortCategoryBoundsTheFactor) {
  const auto c = CountsCorpus({1000, 1000, 100, 1000, 1000});
  const auto s = SmallDatasetSample(c, 1);
  EXPECT_DOUBLE_EQ(s.scale_factor, 100.0);
  EXPECT_EQ(s.taken, (std::array<std::int64_t, kNumCategories>{250, 250, 100, 100, 100}));
  const auto plenty = SmallDatasetSample(CountsCorpus({60, 60, 30, 30, 30}), 1, {50, 50, 20, 20, 20});
  EXPECT_DOUBLE_EQ(plenty.scale_factor, 1.0);
  EXPECT_EQ(plenty.taken, (std::array<std::int64_t, kNumCategories>{50, 50, 20, 20, 20}));
  EXPECT_EQ(KindOf([] { SmallDatasetSample(CountsCorpus({10, 10, 0, 10, 10}), 1); }), ErrorKind::kData);
}

// ---- reports ----

EvalReport SampleReport(const std::string& label, double tweak) {
  ConfusionMatrix m;
  for (int c = 0; c < kNumCategories; ++c) m.counts[c][c] = 10 + c;
  m.counts[0][1] = 3;
  auto r = Prf(m);
  r.label = label;
  r.per_category[2].f1 += tweak;
  r.config_fingerprint = "00ff";
  return r;
}

TEST(Render, ReportTableHasCategoryAndMacroRows) {
  const std::string t = RenderReportTable(SampleReport("x", 0));
  for (const char* name : {"Text", "Title", "List", "Figure", "Table", "Macro"}) {
    EXPECT_NE(t.find(name), std::string::npos) << name;
  }
}

TEST(Render, F1TableRowsAndAverage) {
  std::vector<EvalReport> reports;
  for (const auto& m : AblationOrder()) reports.push_back(SampleReport(m.Label(), 0));
  const std::string t = RenderF1Table(reports);
  for (const auto& r : reports) EXPECT_NE(t.find(r.label), std::string::npos);
  const std::string with_avg = RenderF1Table(reports, true, "Mean");
  EXPECT_NE(with_avg.find("Mean"), std::string::npos);
  EXPECT_EQ(t.find("Mean"), std::string::npos);
  const std::string cmp = RenderComparisonTable(reports);
  EXPECT_NE(cmp.find("Figure"), std::string::npos);
}

TEST(Record, JsonRoundTripKeepsFullPrecision) {
  ExperimentRecord rec;
  rec.kind = "ablation";
  rec.config_fingerprint = "1234abcd";
  rec.seed = 18446744073709551557ull;
  rec.reports = {SampleReport("a", 0.1 + 0.2), SampleReport("b", 1e-17)};
  rec.reports[1].policy = UnmatchedPolicy::kStrict;
  rec.fold_assignment = {0, 1, 4, 2};
  rec.summary["drop"] = 1.0 / 3.0;
  rec.notes["audit"] = "title/list swapped";
  const std::string json = RecordToJson(rec);
  EXPECT_EQ(RecordFromJson(json), rec);
  EXPECT_EQ(RecordToJson(RecordFromJson(json)), json);
  EXPECT_NE(RenderRecord(rec).find("ablation"), std::string::npos);
}

TEST(Record, MalformedJson) {
  try {
    RecordFromJson("{\"kind\": ");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_GT(e.byte_offset(), 0u);
  }
  EXPECT_THROW(RecordFromJson("[1,2]"), Error);
}

}  // namespace
}  // namespace vtlayout
