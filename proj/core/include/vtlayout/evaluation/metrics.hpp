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
#include <optional>
#include <span>
#include <string>

#include "vtlayout/corpus/category.hpp"

namespace vtlayout {

using CategoryCounts = std::array<std::int64_t, kNumCategories>;

// Rows are ground truth, columns are predictions.
struct ConfusionMatrix {
  std::array<CategoryCounts, kNumCategories> counts{};
  CategoryCounts unmatched_gt{};
  CategoryCounts unmatched_pred{};

  std::int64_t matched() const;
  void Merge(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

// One scored item: both sides present for a matched pair, a missing
// prediction for an unmatched ground-truth block, a missing gt for an
// unmatched prediction.
struct ClassifiedPair {
  std::optional<Category> gt;
  std::optional<Category> pred;
};

ConfusionMatrix Confusion(std::span<const ClassifiedPair> pairs);

enum class UnmatchedPolicy {
  kPenalize,  // unmatched gt -> false negative, unmatched pred -> false positive
  kStrict,    // unmatched blocks are ignored
};

UnmatchedPolicy ParseUnmatchedPolicy(const std::string& name);
std::string UnmatchedPolicyName(UnmatchedPolicy policy);

struct CategoryMetrics {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // tp + fp == 0
  bool recall_undefined = false;     // tp + fn == 0

  bool operator==(const CategoryMetrics&) const = default;
};

struct EvalReport {
  std::string label;
  std::array<CategoryMetrics, kNumCategories> per_category{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
  UnmatchedPolicy policy = UnmatchedPolicy::kPenalize;
  std::string config_fingerprint;

  std::array<double, kNumCategories> F1s() const;
  bool operator==(const EvalReport&) const = default;
};

EvalReport Prf(const ConfusionMatrix& matrix, UnmatchedPolicy policy = UnmatchedPolicy::kPenalize);

// Unweighted mean.
double MacroAverage(std::span<const double> values);

}  // namespace vtlayout
