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

#include "vtlayout/common/image.hpp"
#include "vtlayout/corpus/types.hpp"
#include "vtlayout/dvfe/tensor.hpp"

namespace vtlayout {

inline constexpr int kDeepInputSize = 128;

struct PaddedInput {
  Tensor3 pixels;  // kDeepInputSize x kDeepInputSize x 3, values in [0,1]
};

struct PadGeometry {
  int side = 0;
  int pad_left = 0;
  int pad_top = 0;
};

// Odd padding goes to the right / bottom.
PadGeometry SquarePadding(int width, int height);

// White-pads to a square, bilinear-resizes to `size` and scales to [0,1].
PaddedInput PadResize(const Image& rgb, int size = kDeepInputSize);
PaddedInput PadResize(const BlockCrop& crop, int size = kDeepInputSize);

}  // namespace vtlayout
