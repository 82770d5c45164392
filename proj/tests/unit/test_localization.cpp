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

#include <algorithm>
#include <filesystem>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/corpus/coco.hpp"
#include "vtlayout/corpus/geometry.hpp"
#include "vtlayout/corpus/synth.hpp"
#include "vtlayout/localization/localizer.hpp"

namespace vtlayout {
namespace {

Corpus SmallCorpus(int pages = 12, std::uint64_t seed = 7) {
  SynthSpec spec;
  spec.pages = pages;
  return GenerateSyntheticCorpus(spec, seed);
}

PageImage Blank(const std::string& id) { return PageImage{id, Image(10, 10, 3, 255)}; }

std::vector<std::array<double, 4>> SortedBoxes(const std::vector<BlockAnnotation>& v) {
  std::vector<std::array<double, 4>> out;
  for (const auto& a : v) out.push_back({a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h});
  std::sort(out.begin(), out.end());
  return out;
}

TEST(GroundTruthLocalizer, ReturnsUnlabelledBoxesWithUnitScore) {
  std::vector<PageInfo> pages = {{"1", 100, 100, ""}, {"2", 100, 100, ""}};
  std::vector<BlockAnnotation> anns;
  for (int i = 0; i < 3; ++i) {
    BlockAnnotation a;
    a.id = i;
    a.page_id = "1";
    a.bbox = {double(i * 20), 0, 10, 10};
    a.category = Category::kText;
    anns.push_back(a);
  }
  const Corpus c(pages, anns, {}, {}, nullptr);
  const GroundTruthLocalizer loc(c);
  const auto boxes = loc.Localize(Blank("1"));
  ASSERT_EQ(boxes.size(), 3u);
  for (const auto& b : boxes) {
    EXPECT_FALSE(b.category);
    EXPECT_EQ(b.score, 1.0);
  }
  EXPECT_TRUE(loc.Localize(Blank("2")).empty());
  EXPECT_THROW(loc.Localize(Blank("3")), Error);
}

TEST(GroundTruthLocalizer, BoxMultisetEqualsAnnotationsAndMatchesPerfectly) {
  const Corpus c = SmallCorpus();
  const GroundTruthLocalizer loc(c);
  for (const auto& p : c.pages()) {
    const auto boxes = loc.Localize(Blank(p.page_id));
    const auto gts = c.AnnotationsOn(p.page_id);
    EXPECT_EQ(SortedBoxes(boxes), SortedBoxes(gts));
    for (const auto& m : MatchPredictions(boxes, gts)) {
      ASSERT_TRUE(m.gt);
      EXPECT_DOUBLE_EQ(m.iou, 1.0);
    }
  }
}

TEST(DetectionFileLocalizer, EchoingGroundTruthBehavesLikeTheOracle) {
  const Corpus c = SmallCorpus(5);
  std::vector<BlockAnnotation> dets = c.annotations();
  for (auto& d : dets) d.score = 1.0;
  const DetectionMap map = ParseDetections(CocoToJson(c.pages(), dets));
  const DetectionFileLocalizer file_loc(map);
  const GroundTruthLocalizer gt_loc(c);
  for (const auto& p : c.pages()) {
    const auto a = file_loc.Localize(Blank(p.page_id));
    const auto b = gt_loc.Localize(Blank(p.page_id));
    EXPECT_EQ(SortedBoxes(a), SortedBoxes(b));
    for (const auto& d : a) EXPECT_TRUE(d.category);
  }
}

TEST(DetectionFileLocalizer, ScoreFloorFiltersLowConfidence) {
  DetectionMap map;
  BlockAnnotation lo, hi;
  lo.page_id = hi.page_id = "1";
  lo.bbox = {0, 0, 5, 5};
  hi.bbox = {5, 5, 5, 5};
  lo.score = 0.4;
  hi.score = 0.6;
  map["1"] = {lo, hi};
  const DetectionFileLocalizer loc(map, 0.5);
  const auto out = loc.Localize(Blank("1"));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].score, 0.6);
  EXPECT_TRUE(loc.Localize(Blank("unknown")).empty());
  EXPECT_THROW(DetectionFileLocalizer(map, 1.5), Error);
}

TEST(DetectionFileLocalizer, JitteredDetectionsMostlyMatch) {
  const Corpus c = SmallCorpus(20);
  Rng rng(3);
  DetectionMap map;
  for (auto a : c.annotations()) {
    a.bbox.x += rng.Uniform(-3, 3);
    a.bbox.y += rng.Uniform(-3, 3);
    a.score = 0.9;
    map[a.page_id].push_back(a);
  }
  const DetectionFileLocalizer loc(map);
  std::size_t matched = 0, total = 0;
  for (const auto& p : c.pages()) {
    const auto gts = c.AnnotationsOn(p.page_id);
    total += gts.size();
    for (const auto& m : MatchPredictions(loc.Localize(Blank(p.page_id)), gts)) matched += m.gt.has_value();
  }
  EXPECT_GE(static_cast<double>(matched), 0.95 * static_cast<double>(total));
}

TEST(PerturbedLocalizer, ZeroPerturbationIsTheGroundTruth) {
  const Corpus c = SmallCorpus(6);
  const GroundTruthLocalizer gt(c);
  const PerturbedLocalizer pert(c, 0.0, 0.0, 99);
  for (const auto& p : c.pages()) EXPECT_EQ(pert.Localize(Blank(p.page_id)), gt.Localize(Blank(p.page_id)));
}

TEST(PerturbedLocalizer, DropRateIsBinomial) {
  std::vector<PageInfo> pages;
  std::vector<BlockAnnotation> anns;
  for (int p = 0; p < 10; ++p) {
    pages.push_back({std::to_string(p), 1000, 1000, ""});
    for (int i = 0; i < 100; ++i) {
      BlockAnnotation a;
      a.id = p * 100 + i;
      a.page_id = std::to_string(p);
      a.bbox = {double(i % 10) * 90, double(i / 10) * 90, 50, 50};
      a.category = Category::kText;
      anns.push_back(a);
    }
  }
  const Corpus c(pages, anns, {}, {}, nullptr);
  const PerturbedLocalizer loc(c, 0.0, 0.5, 5);
  std::size_t kept = 0;
  for (const auto& p : pages) kept += loc.Localize(Blank(p.page_id)).size();
  EXPECT_GE(kept, 450u);
  EXPECT_LE(kept, 550u);
}

TEST(PerturbedLocalizer, JitterKeepsLargeBoxesAboveIouBound) {
  const Corpus c = SmallCorpus(30);
  const PerturbedLocalizer loc(c, 3.0, 0.0, 1);
  int checked = 0;
  for (const auto& p : c.pages()) {
    const auto gts = c.AnnotationsOn(p.page_id);
    const auto boxes = loc.Localize(Blank(p.page_id));
    ASSERT_EQ(boxes.size(), gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) {
      EXPECT_GT(boxes[i].bbox.w, 0);
      EXPECT_EQ(boxes[i].bbox.w, gts[i].bbox.w);
      // Worst case for a +-3 px shift on both axes of a w x h box.
      const double w = gts[i].bbox.w, h = gts[i].bbox.h;
      const double inter = (w - 3) * (h - 3);
      const double worst = inter / (2 * w * h - inter);
      if (w > 30 && h > 30) {
        ++checked;
        EXPECT_GE(Iou(boxes[i].bbox, gts[i].bbox), worst);
        if (w > 33 && h > 33) EXPECT_GT(Iou(boxes[i].bbox, gts[i].bbox), 0.7);
      }
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(PerturbedLocalizer, DeterministicPerSeedAndValidated) {
  const Corpus c = SmallCorpus(4);
  const PerturbedLocalizer a(c, 2.0, 0.2, 11), b(c, 2.0, 0.2, 11);
  for (const auto& p : c.pages()) EXPECT_EQ(a.Localize(Blank(p.page_id)), b.Localize(Blank(p.page_id)));
  EXPECT_THROW(PerturbedLocalizer(c, -1.0, 0.0, 1), Error);
  EXPECT_THROW(PerturbedLocalizer(c, 0.0, 1.0, 1), Error);
}

TEST(DetectorReferenceConfig, DocumentsTheExpectedSettings) {
  const DetectorReferenceConfig cfg;
  EXPECT_EQ(cfg.epochs, 30);
  EXPECT_EQ(cfg.batch_size, 8);
  EXPECT_DOUBLE_EQ(cfg.optimizer.learning_rate, 0.02);
  EXPECT_DOUBLE_EQ(cfg.optimizer.momentum, 0.9);
  EXPECT_DOUBLE_EQ(cfg.optimizer.weight_decay, 0.0001);
}

}  // namespace
}  // namespace vtlayout
