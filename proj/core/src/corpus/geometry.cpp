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

#include "vtlayout/corpus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace vtlayout {

double Iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<MatchPair> MatchPredictions(std::span<const BlockAnnotation> preds,
                                        std::span<const BlockAnnotation> gts, double threshold) {
  struct Candidate {
    double iou;
    std::size_t pred;
    std::size_t gt;
  };
  std::vector<Candidate> candidates;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double v = Iou(preds[p].bbox, gts[g].bbox);
      if (v >= threshold && v > 0.0) candidates.push_back({v, p, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.pred, a.gt) < std::tie(b.pred, b.gt);
  });
  std::vector<MatchPair> out(preds.size());
  for (std::size_t p = 0; p < preds.size(); ++p) out[p].pred = p;
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> pred_used(preds.size(), false);
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    out[c.pred].gt = c.gt;
    out[c.pred].iou = c.iou;
  }
  return out;
}

PixelRect ClampToPage(const BBox& box, int width, int height) {
  const int x0 = std::clamp(static_cast<int>(std::floor(box.x)), 0, width);
  const int y0 = std::clamp(static_cast<int>(std::floor(box.y)), 0, height);
  const int x1 = std::clamp(static_cast<int>(std::ceil(box.right())), 0, width);
  const int y1 = std::clamp(static_cast<int>(std::ceil(box.bottom())), 0, height);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

}  // namespace vtlayout
