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
#include <span>
#include <vector>

#include "vtlayout/corpus/category.hpp"
#include "vtlayout/corpus/types.hpp"
#include "vtlayout/dvfe/backbone.hpp"

namespace vtlayout {

// A padded block image stored as bytes, with its label.
struct PretrainSample {
  std::vector<std::uint8_t> pixels;  // kDeepInputSize^2 x 3, HWC
  Category label = Category::kText;
};

PretrainSample MakePretrainSample(const BlockCrop& crop);

struct PretrainConfig {
  int epochs = 3;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  // Weights each class by n / (K * n_c) so rare categories are not drowned out.
  bool balance_classes = true;
};

struct PretrainResult {
  std::vector<double> epoch_loss;
  double final_accuracy = 0.0;  // on the training samples during the last epoch
};

// Supervised training of the backbone through pooling and a temporary linear
// classifier, with Adam. Weights are rounded to 32 bits afterwards.
PretrainResult PretrainBackbone(Backbone& backbone, std::span<const PretrainSample> samples,
                                const PretrainConfig& config);

}  // namespace vtlayout
