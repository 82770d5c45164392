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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vtlayout/corpus/coco.hpp"
#include "vtlayout/corpus/corpus.hpp"

namespace vtlayout {

class Localizer {
 public:
  virtual ~Localizer() = default;
  // Candidate boxes for one page; positive area, scores in [0,1].
  virtual std::vector<BlockAnnotation> Localize(const PageImage& page) const = 0;
  virtual std::string name() const = 0;
};

// Settings of the stage-1 detector this pipeline expects detections from.
// Recorded for reference only; nothing here trains a detector.
struct DetectorReferenceConfig {
  struct Optimizer {
    std::string name = "sgd";
    double learning_rate = 0.02;
    double momentum = 0.9;
    double weight_decay = 0.0001;
  };
  std::string backbone = "cascade_mask_rcnn_r50_fpn";
  int epochs = 30;
  int batch_size = 8;
  Optimizer optimizer;
};

class GroundTruthLocalizer : public Localizer {
 public:
  explicit GroundTruthLocalizer(const Corpus& corpus);
  std::vector<BlockAnnotation> Localize(const PageImage& page) const override;
  std::string name() const override { return "ground_truth"; }

 private:
  const Corpus& corpus_;
};

inline constexpr double kDefaultScoreFloor = 0.05;

class DetectionFileLocalizer : public Localizer {
 public:
  explicit DetectionFileLocalizer(DetectionMap detections, double score_floor = kDefaultScoreFloor);
  static std::unique_ptr<DetectionFileLocalizer> FromFile(const std::filesystem::path& path,
                                                          double score_floor = kDefaultScoreFloor);
  std::vector<BlockAnnotation> Localize(const PageImage& page) const override;
  std::string name() const override { return "detection_file"; }

 private:
  DetectionMap detections_;
  double score_floor_;
};

class PerturbedLocalizer : public Localizer {
 public:
  PerturbedLocalizer(const Corpus& corpus, double jitter, double drop_rate, std::uint64_t seed);
  std::vector<BlockAnnotation> Localize(const PageImage& page) const override;
  std::string name() const override { return "perturbed"; }

 private:
  const Corpus& corpus_;
  double jitter_;
  double drop_rate_;
  std::uint64_t seed_;
};

}  // namespace vtlayout
