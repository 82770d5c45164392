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

#include "vtlayout/dvfe/deep.hpp"

#include "vtlayout/common/error.hpp"

namespace vtlayout {

std::vector<double> PooledEmbedding(const BlockCrop& crop, const Backbone& backbone) {
  return GlobalAveragePool(backbone.Forward(PadResize(crop)));
}

DeepFeature ExtractDeep(const BlockCrop& crop, const Backbone& backbone, const SeBlock& se) {
  if (se.channels() != backbone.channels()) Fail(ErrorKind::kShape, "SE block does not match backbone channels");
  const FeatureMap map = backbone.Forward(PadResize(crop));
  return {GlobalAveragePool(SeRecalibrate(map, se))};
}

}  // namespace vtlayout
