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

#include "vtlayout/evaluation/metrics.hpp"

#include <numeric>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

std::int64_t ConfusionMatrix::matched() const {
  std::int64_t total = 0;
  for (const auto& row : counts) total = std::accumulate(row.begin(), row.end(), total);
  return total;
}

void ConfusionMatrix::Merge(const ConfusionMatrix& other) {
  for (int r = 0; r < kNumCategories; ++r) {
    for (int c = 0; c < kNumCategories; ++c) counts[r][c] += other.counts[r][c];
    unmatched_gt[r] += other.unmatched_gt[r];
    unmatched_pred[r] += other.unmatched_pred[r];
  }
}

ConfusionMatrix Confusion(std::span<const ClassifiedPair> pairs) {
  ConfusionMatrix m;
  for (const auto& p : pairs) {
    if (p.gt && p.pred) {
      ++m.counts[CategoryCode(*p.gt)][CategoryCode(*p.pred)];
    } else if (p.gt) {
      ++m.unmatched_gt[CategoryCode(*p.gt)];
    } else if (p.pred) {
      ++m.unmatched_pred[CategoryCode(*p.pred)];
    }
  }
  return m;
}

UnmatchedPolicy ParseUnmatchedPolicy(const std::string& name) {
  if (name == "penalize") return UnmatchedPolicy::kPenalize;
  if (name == "strict") return UnmatchedPolicy::kStrict;
  Fail(ErrorKind::kConfiguration, "eval.unmatched must be 'penalize' or 'strict', got '" + name + "'");
}

std::string UnmatchedPolicyName(UnmatchedPolicy policy) {
  return policy == UnmatchedPolicy::kPenalize ? "penalize" : "strict";
}

std::array<double, kNumCategories> EvalReport::F1s() const {
  std::array<double, kNumCategories> out{};
  for (int c = 0; c < kNumCategories; ++c) out[c] = per_category[c].f1;
  return out;
}

EvalReport Prf(const ConfusionMatrix& matrix, UnmatchedPolicy policy) {
  EvalReport r;
  r.confusion = matrix;
  r.policy = policy;
  const bool penalize = policy == UnmatchedPolicy::kPenalize;
  std::array<double, kNumCategories> p{}, rc{}, f{};
  for (int c = 0; c < kNumCategories; ++c) {
    CategoryMetrics& m = r.per_category[c];
    m.tp = matrix.counts[c][c];
    for (int k = 0; k < kNumCategories; ++k) {
      if (k == c) continue;
      m.fp += matrix.counts[k][c];
      m.fn += matrix.counts[c][k];
    }
    if (penalize) {
      m.fp += matrix.unmatched_pred[c];
      m.fn += matrix.unmatched_gt[c];
    }
    m.precision_undefined = m.tp + m.fp == 0;
    m.recall_undefined = m.tp + m.fn == 0;
    m.precision = m.precision_undefined ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    m.recall = m.recall_undefined ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    p[c] = m.precision;
    rc[c] = m.recall;
    f[c] = m.f1;
  }
  r.macro_precision = MacroAverage(p);
  r.macro_recall = MacroAverage(rc);
  r.macro_f1 = MacroAverage(f);
  return r;
}

double MacroAverage(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace vtlayout
