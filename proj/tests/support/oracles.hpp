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

// Independent reference implementations used by the unit and acceptance
// tests. They favour obviousness over speed and share no code with the
// library beyond its plain data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vtlayout/corpus/category.hpp"
#include "vtlayout/corpus/types.hpp"
#include "vtlayout/evaluation/metrics.hpp"

namespace vtlayout::oracle {

// Expands a confusion matrix back into raw (gt, pred) items.
inline std::vector<ClassifiedPair> ExpandPairs(const ConfusionMatrix& m) {
  std::vector<ClassifiedPair> out;
  for (int g = 0; g < kNumCategories; ++g) {
    for (int p = 0; p < kNumCategories; ++p) {
      for (std::int64_t k = 0; k < m.counts[g][p]; ++k) {
        out.push_back({static_cast<Category>(g), static_cast<Category>(p)});
      }
    }
    for (std::int64_t k = 0; k < m.unmatched_gt[g]; ++k) out.push_back({static_cast<Category>(g), std::nullopt});
    for (std::int64_t k = 0; k < m.unmatched_pred[g]; ++k) out.push_back({std::nullopt, static_cast<Category>(g)});
  }
  return out;
}

struct BruteMetrics {
  std::array<std::int64_t, kNumCategories> tp{}, fp{}, fn{};
  std::array<double, kNumCategories> precision{}, recall{}, f1{};
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
};

// Per-category scores from a pair-by-pair loop. When `penalize` is false
// items with a missing side are ignored.
inline BruteMetrics BrutePrf(const std::vector<ClassifiedPair>& pairs, bool penalize) {
  BruteMetrics r;
  for (int c = 0; c < kNumCategories; ++c) {
    const auto cat = static_cast<Category>(c);
    for (const auto& item : pairs) {
      const bool both = item.gt.has_value() && item.pred.has_value();
      if (!both && !penalize) continue;
      const bool gt_is = item.gt == cat;
      const bool pred_is = item.pred == cat;
      if (gt_is && pred_is) ++r.tp[c];
      if (!gt_is && pred_is) ++r.fp[c];
      if (gt_is && !pred_is) ++r.fn[c];
    }
    const double tp = static_cast<double>(r.tp[c]);
    r.precision[c] = r.tp[c] + r.fp[c] == 0 ? 0.0 : tp / static_cast<double>(r.tp[c] + r.fp[c]);
    r.recall[c] = r.tp[c] + r.fn[c] == 0 ? 0.0 : tp / static_cast<double>(r.tp[c] + r.fn[c]);
    const double s = r.precision[c] + r.recall[c];
    r.f1[c] = s > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / s : 0.0;
  }
  for (int c = 0; c < kNumCategories; ++c) {
    r.macro_precision += r.precision[c];
    r.macro_recall += r.recall[c];
    r.macro_f1 += r.f1[c];
  }
  r.macro_precision /= kNumCategories;
  r.macro_recall /= kNumCategories;
  r.macro_f1 /= kNumCategories;
  return r;
}

// IoU of two boxes with integer corners by counting unit cells.
inline double CellCountIou(int ax, int ay, int aw, int ah, int bx, int by, int bw, int bh) {
  const int x0 = std::min(ax, bx), y0 = std::min(ay, by);
  const int x1 = std::max(ax + aw, bx + bw), y1 = std::max(ay + ah, by + bh);
  std::int64_t inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = x >= ax && x < ax + aw && y >= ay && y < ay + ah;
      const bool in_b = x >= bx && x < bx + bw && y >= by && y < by + bh;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Smooth-idf TF-IDF with L2 normalization over whitespace-split documents
// whose tokens are already in normal form. Returns the sorted vocabulary and
// one dense row per query.
struct ReferenceTfidf {
  std::vector<std::string> terms;
  std::vector<double> idf;
  std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> SplitWords(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline ReferenceTfidf ReferenceFitTransform(const std::vector<std::string>& docs,
                                            const std::vector<std::string>& queries) {
  ReferenceTfidf r;
  std::map<std::string, int> df;
  for (const auto& d : docs) {
    const auto words = SplitWords(d);
    std::set<std::string> seen(words.begin(), words.end());
    for (const auto& w : seen) ++df[w];
  }
  const double n = static_cast<double>(docs.size());
  for (const auto& [term, count] : df) {
    r.terms.push_back(term);
    r.idf.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  for (const auto& q : queries) {
    std::vector<double> row(r.terms.size(), 0.0);
    for (const auto& w : SplitWords(q)) {
      for (std::size_t t = 0; t < r.terms.size(); ++t) {
        if (r.terms[t] == w) row[t] += 1.0;
      }
    }
    double norm = 0.0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      row[t] *= r.idf[t];
      norm += row[t] * row[t];
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace vtlayout::oracle
