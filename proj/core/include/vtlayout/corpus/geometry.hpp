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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vtlayout/corpus/types.hpp"

namespace vtlayout {

// Intersection over union of two positive-area boxes.
double Iou(const BBox& a, const BBox& b);

struct MatchPair {
  std::size_t pred = 0;
  std::optional<std::size_t> gt;
  double iou = 0.0;
};

inline constexpr double kDefaultMatchThreshold = 0.5;

// Greedy one-to-one assignment in descending IoU order. Pairs with IoU below
// `threshold` stay unmatched; each ground truth is used at most once. Equal
// IoUs are resolved by (pred index, gt index). Result is in prediction order.
std::vector<MatchPair> MatchPredictions(std::span<const BlockAnnotation> preds,
                                        std::span<const BlockAnnotation> gts,
                                        double threshold = kDefaultMatchThreshold);

// Integer pixel rectangle covering the box, clamped to a width x height page.
// Empty if nothing of the box lies on the page.
PixelRect ClampToPage(const BBox& box, int width, int height);

}  // namespace vtlayout
