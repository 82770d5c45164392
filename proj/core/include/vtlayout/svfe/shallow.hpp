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
#include <vector>

#include "vtlayout/common/image.hpp"
#include "vtlayout/corpus/types.hpp"

namespace vtlayout {

inline constexpr int kHistogramBins = 256;

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

struct ShallowFeature {
  std::array<double, kHistogramBins> values{};
  bool normalized = true;
};

struct ShallowConfig {
  bool normalize = true;
};

// Integer BT.601 luma, rounded half up.
inline std::uint8_t Luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299U * r + 587U * g + 114U * b + 500U) / 1000U);
}

GrayImage ToGrayscale(const Image& rgb);
GrayImage ToGrayscale(const BlockCrop& crop);

// Throws kDegenerate on an empty image.
ShallowFeature PixelHistogram(const GrayImage& gray, bool normalize);

ShallowFeature ExtractShallow(const BlockCrop& crop, const ShallowConfig& config = {});

}  // namespace vtlayout
