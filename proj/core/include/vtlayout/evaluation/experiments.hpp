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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vtlayout/corpus/corpus.hpp"
#include "vtlayout/evaluation/metrics.hpp"
#include "vtlayout/fusion/model.hpp"

namespace vtlayout {

// D+S+T, D+S, D+T, S+T, D, T, S.
std::vector<AblationMask> AblationOrder();

struct AblationRow {
  AblationMask mask;
  EvalReport report;
};

using MaskRunner = std::function<EvalReport(const AblationMask&)>;
std::vector<AblationRow> RunAblation(const MaskRunner& run);

struct FoldAssignment {
  int folds = 0;
  std::vector<int> fold_of;  // per annotation index

  std::vector<std::size_t> TestIndices(int fold) const;
  std::vector<std::size_t> TrainIndices(int fold) const;
};

// Shuffles each category with `seed` and deals its blocks round-robin, so
// per-category fold sizes differ by at most one. Throws kConfiguration when
// some category has fewer than `folds` labelled blocks.
FoldAssignment StratifiedFolds(std::span<const BlockAnnotation> annotations, int folds, std::uint64_t seed);

struct CrossValidationResult {
  FoldAssignment assignment;
  std::vector<EvalReport> folds;
  std::array<double, kNumCategories> mean_f1{};
  double mean_macro_f1 = 0.0;
};

using FoldRunner = std::function<EvalReport(int fold, const std::vector<std::size_t>& train,
                                            const std::vector<std::size_t>& test)>;
CrossValidationResult FiveFoldCv(const Corpus& corpus, std::uint64_t seed, const FoldRunner& run, int folds = 5);

// Unweighted column means of a folds x columns table.
std::vector<double> FoldMeans(const std::vector<std::vector<double>>& table);

struct FoldAverageAudit {
  std::vector<double> recomputed;
  std::vector<int> mismatched_columns;
  std::vector<std::pair<int, int>> transposed_columns;

  bool consistent() const { return mismatched_columns.empty(); }
};

// Compares a reported average row with the recomputed fold means and names
// column pairs whose values appear swapped.
FoldAverageAudit AuditFoldAverage(const std::vector<std::vector<double>>& table, const std::vector<double>& reported,
                                  double tolerance = 5e-5);

struct SmallSample {
  Corpus corpus;
  double scale_factor = 1.0;
  std::array<std::int64_t, kNumCategories> requested{};
  std::array<std::int64_t, kNumCategories> taken{};
};

// Reference counts per category code (Text, Title, List, Figure, Table).
inline constexpr std::array<std::int64_t, kNumCategories> kSmallDatasetTargets = {25000, 25000, 10000, 10000, 10000};

// Draws each category without replacement at the reference ratios. When a
// category cannot supply its share every count is divided by the smallest
// common factor that makes all of them available.
SmallSample SmallDatasetSample(const Corpus& corpus, std::uint64_t seed,
                               const std::array<std::int64_t, kNumCategories>& targets = kSmallDatasetTargets);

}  // namespace vtlayout
