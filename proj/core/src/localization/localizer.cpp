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

#include "vtlayout/localization/localizer.hpp"

#include <cmath>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"
#include "vtlayout/common/rng.hpp"

namespace vtlayout {

namespace {

std::vector<BlockAnnotation> GroundTruthBoxes(const Corpus& corpus, const std::string& page_id) {
  if (corpus.FindPage(page_id) == nullptr) Fail(ErrorKind::kLookup, "page not in corpus: " + page_id);
  std::vector<BlockAnnotation> out = corpus.AnnotationsOn(page_id);
  for (auto& a : out) {
    a.category.reset();
    a.score = 1.0;
  }
  return out;
}

}  // namespace

GroundTruthLocalizer::GroundTruthLocalizer(const Corpus& corpus) : corpus_(corpus) {}

std::vector<BlockAnnotation> GroundTruthLocalizer::Localize(const PageImage& page) const {
  return GroundTruthBoxes(corpus_, page.page_id);
}

DetectionFileLocalizer::DetectionFileLocalizer(DetectionMap detections, double score_floor)
    : detections_(std::move(detections)), score_floor_(score_floor) {
  if (!(score_floor >= 0.0 && score_floor <= 1.0)) {
    Fail(ErrorKind::kConfiguration, "score floor must lie in [0,1]");
  }
}

std::unique_ptr<DetectionFileLocalizer> DetectionFileLocalizer::FromFile(const std::filesystem::path& path,
                                                                         double score_floor) {
  return std::make_unique<DetectionFileLocalizer>(LoadDetections(path), score_floor);
}

std::vector<BlockAnnotation> DetectionFileLocalizer::Localize(const PageImage& page) const {
  std::vector<BlockAnnotation> out;
  auto it = detections_.find(page.page_id);
  if (it == detections_.end()) return out;
  for (const auto& d : it->second) {
    if (d.score.value_or(1.0) >= score_floor_ && d.bbox.w > 0 && d.bbox.h > 0) out.push_back(d);
  }
  return out;
}

PerturbedLocalizer::PerturbedLocalizer(const Corpus& corpus, double jitter, double drop_rate, std::uint64_t seed)
    : corpus_(corpus), jitter_(jitter), drop_rate_(drop_rate), seed_(seed) {
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) Fail(ErrorKind::kConfiguration, "jitter must be >= 0");
  if (!(drop_rate >= 0.0 && drop_rate < 1.0)) Fail(ErrorKind::kConfiguration, "drop rate must lie in [0,1)");
}

std::vector<BlockAnnotation> PerturbedLocalizer::Localize(const PageImage& page) const {
  std::vector<BlockAnnotation> boxes = GroundTruthBoxes(corpus_, page.page_id);
  if (jitter_ == 0.0 && drop_rate_ == 0.0) return boxes;
  Rng rng(MixSeed(seed_, HashBytes(page.page_id)));
  std::vector<BlockAnnotation> out;
  out.reserve(boxes.size());
  for (auto& b : boxes) {
    const bool drop = rng.Bernoulli(drop_rate_);
    const double dx = rng.Uniform(-jitter_, jitter_);
    const double dy = rng.Uniform(-jitter_, jitter_);
    if (drop) continue;
    // Shifts are applied to the origin only; width and height are kept.
    b.bbox.x += dx;
    b.bbox.y += dy;
    b.id = -1;
    out.push_back(b);
  }
  return out;
}

}  // namespace vtlayout
