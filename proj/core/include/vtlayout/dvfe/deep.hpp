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

#include <vector>

#include "vtlayout/corpus/types.hpp"
#include "vtlayout/dvfe/backbone.hpp"
#include "vtlayout/dvfe/se_block.hpp"

namespace vtlayout {

struct DeepFeature {
  std::vector<double> values;
};

// Pooled backbone activations before recalibration. Because pooling
// commutes with per-channel scaling, this is what the feature cache stores.
std::vector<double> PooledEmbedding(const BlockCrop& crop, const Backbone& backbone);

DeepFeature ExtractDeep(const BlockCrop& crop, const Backbone& backbone, const SeBlock& se);

}  // namespace vtlayout
