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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vtlayout/corpus/category.hpp"

namespace vtlayout {

struct CorpusSection {
  // Empty: generate the synthetic corpus in memory from the fields below.
  std::string path;
  std::string train_file = "train.json";
  std::string val_file = "val.json";
  std::string train_images = "images";
  std::string val_images = "images";
  std::string texts_file = "texts.json";
  int pages = 500;
  int page_width = 480;
  int page_height = 640;
  std::array<double, kNumCategories> weights = {7.0, 2.0, 0.25, 1.0 / 3.0, 1.0 / 3.0};
  double validation_fraction = 0.2;
};

struct LocalizerSection {
  std::string kind = "ground_truth";  // ground_truth | detection_file | perturbed
  std::string detections_path;
  double score_floor = 0.05;
  double jitter = 0.0;
  double drop_rate = 0.0;
  std::optional<std::uint64_t> seed;
};

struct SvfeSection {
  bool normalize = true;
};

struct DvfeSection {
  std::string backbone = "tiny";  // tiny | reference
  std::string weights_path;
  int se_ratio = 16;
  bool trainable = false;
  // Supervised epochs on the training split before features are extracted;
  // 0 keeps the initialization. Ignored when weights_path is set.
  int pretrain_epochs = 3;
  int pretrain_batch_size = 32;
  double pretrain_lr = 1e-3;
};

struct TfeSection {
  std::string reader = "ground_truth";  // ground_truth | external | null
  std::string ocr_command;
  int max_vocab = 4096;
  int upscale_factor = 8;
  std::int64_t max_upscale_pixels = 64000000;
};

struct TrainSection {
  std::string mask = "D+S+T";
  int batch_size = 64;
  int epochs = 20;
  double lr = 1e-3;
  std::optional<std::uint64_t> seed;
  bool class_weights = false;
  double weight_decay = 0.0;
  bool standardize = true;
};

struct EvalSection {
  double match_threshold = 0.5;
  std::string unmatched = "penalize";  // penalize | strict
  int folds = 5;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  std::string cache_dir;  // empty: VTLAYOUT_CACHE_DIR, else ./vtlayout_cache
  int workers = 0;        // 0: available parallelism
  CorpusSection corpus;
  LocalizerSection localizer;
  SvfeSection svfe;
  DvfeSection dvfe;
  TfeSection tfe;
  TrainSection train;
  EvalSection eval;
};

// Parses a JSON document over the defaults, then applies "a.b=value"
// overrides in order. Unknown keys and mistyped values are rejected
// (kConfiguration); malformed JSON raises FormatError.
PipelineConfig ParseConfig(const std::string& json_text, const std::vector<std::string>& overrides = {});
PipelineConfig LoadConfig(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
PipelineConfig ConfigWithOverrides(const PipelineConfig& base, const std::vector<std::string>& overrides);

// Every key, defaults included, with sorted keys.
std::string ConfigToJson(const PipelineConfig& config);

// Stable hash of the normalized config. Cache location and worker count are
// excluded since they never change results.
std::string ConfigFingerprint(const PipelineConfig& config);
// Same, restricted to the named top-level sections ("seed" selects the
// global seed).
std::string SectionFingerprint(const PipelineConfig& config, const std::vector<std::string>& sections);

// Throws kConfiguration on values outside their domains.
void ValidateConfig(const PipelineConfig& config);

std::filesystem::path ResolveCacheDir(const PipelineConfig& config);

// Sub-seeds default to a mix of the global seed and a fixed stream tag.
std::uint64_t TrainSeed(const PipelineConfig& config);
std::uint64_t LocalizerSeed(const PipelineConfig& config);
std::uint64_t BackboneSeed(const PipelineConfig& config);

}  // namespace vtlayout
