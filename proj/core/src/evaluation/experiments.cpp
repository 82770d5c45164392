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

#include "vtlayout/evaluation/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/rng.hpp"

namespace vtlayout {

std::vector<AblationMask> AblationOrder() {
  return {{true, true, true}, {true, true, false}, {true, false, true}, {false, true, true},
          {true, false, false}, {false, false, true}, {false, true, false}};
}

std::vector<AblationRow> RunAblation(const MaskRunner& run) {
  std::vector<AblationRow> rows;
  for (const auto& mask : AblationOrder()) {
    EvalReport report = run(mask);
    report.label = mask.Label();
    rows.push_back({mask, std::move(report)});
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::TestIndices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::TrainIndices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] >= 0 && fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment StratifiedFolds(std::span<const BlockAnnotation> annotations, int folds, std::uint64_t seed) {
  if (folds < 2) Fail(ErrorKind::kConfiguration, "cross-validation needs at least 2 folds");
  std::array<std::vector<std::size_t>, kNumCategories> by_cat;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (annotations[i].category) by_cat[CategoryCode(*annotations[i].category)].push_back(i);
  }
  for (Category c : kAllCategories) {
    if (static_cast<int>(by_cat[CategoryCode(c)].size()) < folds) {
      Fail(ErrorKind::kConfiguration, "cross-validation needs at least " + std::to_string(folds) + " " + std::string(
                                          CategoryName(c)) + " blocks, found " +
                                          std::to_string(by_cat[CategoryCode(c)].size()));
    }
  }
  FoldAssignment a;
  a.folds = folds;
  a.fold_of.assign(annotations.size(), -1);
  Rng rng(MixSeed(seed, 0xF01D));
  for (auto& members : by_cat) {
    rng.Shuffle(std::span<std::size_t>(members));
    for (std::size_t k = 0; k < members.size(); ++k) a.fold_of[members[k]] = static_cast<int>(k % folds);
  }
  return a;
}

CrossValidationResult FiveFoldCv(const Corpus& corpus, std::uint64_t seed, const FoldRunner& run, int folds) {
  CrossValidationResult r;
  r.assignment = StratifiedFolds(corpus.annotations(), folds, seed);
  std::vector<std::vector<double>> table;
  std::vector<double> macro;
  for (int f = 0; f < folds; ++f) {
    EvalReport report = run(f, r.assignment.TrainIndices(f), r.assignment.TestIndices(f));
    report.label = "Fold" + std::to_string(f + 1);
    const auto f1 = report.F1s();
    table.emplace_back(f1.begin(), f1.end());
    macro.push_back(report.macro_f1);
    r.folds.push_back(std::move(report));
  }
  const auto means = FoldMeans(table);
  std::copy(means.begin(), means.end(), r.mean_f1.begin());
  r.mean_macro_f1 = MacroAverage(macro);
  return r;
}

std::vector<double> FoldMeans(const std::vector<std::vector<double>>& table) {
  if (table.empty()) return {};
  const std::size_t cols = table.front().size();
  std::vector<double> out(cols, 0.0);
  for (const auto& row : table) {
    if (row.size() != cols) Fail(ErrorKind::kShape, "fold table rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c];
  }
  for (double& v : out) v /= static_cast<double>(table.size());
  return out;
}

FoldAverageAudit AuditFoldAverage(const std::vector<std::vector<double>>& table, const std::vector<double>& reported,
                                  double tolerance) {
  FoldAverageAudit audit;
  audit.recomputed = FoldMeans(table);
  if (reported.size() != audit.recomputed.size()) Fail(ErrorKind::kShape, "average row has the wrong width");
  auto close = [tolerance](double a, double b) { return std::abs(a - b) <= tolerance; };
  const int n = static_cast<int>(reported.size());
  for (int c = 0; c < n; ++c) {
    if (!close(reported[c], audit.recomputed[c])) audit.mismatched_columns.push_back(c);
  }
  for (std::size_t i = 0; i < audit.mismatched_columns.size(); ++i) {
    for (std::size_t j = i + 1; j < audit.mismatched_columns.size(); ++j) {
      const int a = audit.mismatched_columns[i];
      const int b = audit.mismatched_columns[j];
      if (close(reported[a], audit.recomputed[b]) && close(reported[b], audit.recomputed[a])) {
        audit.transposed_columns.emplace_back(a, b);
      }
    }
  }
  return audit;
}

SmallSample SmallDatasetSample(const Corpus& corpus, std::uint64_t seed,
                               const std::array<std::int64_t, kNumCategories>& targets) {
  std::array<std::vector<std::size_t>, kNumCategories> by_cat;
  const auto& anns = corpus.annotations();
  for (std::size_t i = 0; i < anns.size(); ++i) {
    if (anns[i].category) by_cat[CategoryCode(*anns[i].category)].push_back(i);
  }
  SmallSample s;
  s.requested = targets;
  double factor = 1.0;
  for (int c = 0; c < kNumCategories; ++c) {
    if (targets[c] <= 0) continue;
    const auto avail = static_cast<double>(by_cat[c].size());
    if (avail == 0) Fail(ErrorKind::kData, std::string("no ") + std::string(CategoryName(static_cast<Category>(c))) +
                                               " blocks available to sample");
    factor = std::max(factor, static_cast<double>(targets[c]) / avail);
  }
  s.scale_factor = factor;
  Rng rng(MixSeed(seed, 0x5A11));
  std::vector<std::size_t> keep;
  for (int c = 0; c < kNumCategories; ++c) {
    auto& members = by_cat[c];
    const auto want = std::min<std::int64_t>(static_cast<std::int64_t>(members.size()),
                                             std::llround(static_cast<double>(targets[c]) / factor));
    rng.Shuffle(std::span<std::size_t>(members));
    keep.insert(keep.end(), members.begin(), members.begin() + want);
    s.taken[c] = want;
  }
  std::sort(keep.begin(), keep.end());
  s.corpus = corpus.SubsetAnnotations(keep, corpus.split());
  return s;
}

}  // namespace vtlayout
