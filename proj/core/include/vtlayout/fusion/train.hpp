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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vtlayout/fusion/model.hpp"

namespace vtlayout {

struct TrainConfig {
  int batch_size = 64;
  int epochs = 20;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::uint64_t seed = 0;
  bool class_weights = false;
  double weight_decay = 0.0;
  bool standardize = true;
};

void ValidateTrainConfig(const TrainConfig& cfg);

struct TrainResult {
  std::vector<double> epoch_loss;
};

// Shallow inputs are centred and scaled to unit variance; deep inputs are
// scaled to unit RMS per channel (kept non-negative for the excitation).
void FitStandardizers(FusionModel& model, std::span<const FeatureBundle> data);

// n / (K * n_c) per class; absent classes get weight 0.
std::array<double, kNumCategories> InverseFrequencyWeights(std::span<const FeatureBundle> data);

using EpochCallback = std::function<void(int epoch, double loss)>;

// Adam on mean cross-entropy. Throws kData for unlabeled bundles and
// kDivergence (naming the batch) when the loss stops being finite.
TrainResult Train(FusionModel& model, std::span<const FeatureBundle> data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

struct GradientCheckOptions {
  int coords_per_param = 20;
  double step = 1e-3;
  std::uint64_t seed = 0;
  // Multiplies every analytic gradient by (1 + value); a checker self-test.
  double analytic_perturbation = 0.0;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::map<std::string, double> per_param;
  int checked = 0;
  int skipped_at_kinks = 0;
};

double RelativeError(double analytic, double numeric);

GradientCheckResult GradientCheck(FusionModel& model, std::span<const FeatureBundle> bundles,
                                  const GradientCheckOptions& options = {});

}  // namespace vtlayout
