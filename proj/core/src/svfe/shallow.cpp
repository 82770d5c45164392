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

#include "vtlayout/svfe/shallow.hpp"

#include "vtlayout/common/error.hpp"

namespace vtlayout {

GrayImage ToGrayscale(const Image& rgb) {
  if (rgb.channels != 3) Fail(ErrorKind::kData, "grayscale conversion expects 3 channels");
  GrayImage out;
  out.width = rgb.width;
  out.height = rgb.height;
  out.data.resize(rgb.pixel_count());
  const std::uint8_t* p = rgb.data.data();
  for (std::size_t i = 0; i < out.data.size(); ++i, p += 3) out.data[i] = Luma(p[0], p[1], p[2]);
  return out;
}

GrayImage ToGrayscale(const BlockCrop& crop) { return ToGrayscale(crop.pixels); }

ShallowFeature PixelHistogram(const GrayImage& gray, bool normalize) {
  if (gray.width <= 0 || gray.height <= 0 || gray.data.empty()) {
    Fail(ErrorKind::kDegenerate, "histogram of an empty crop");
  }
  std::array<std::uint64_t, kHistogramBins> counts{};
  for (std::uint8_t v : gray.data) ++counts[v];
  ShallowFeature f;
  f.normalized = normalize;
  const double n = static_cast<double>(gray.data.size());
  for (int b = 0; b < kHistogramBins; ++b) {
    f.values[b] = normalize ? static_cast<double>(counts[b]) / n : static_cast<double>(counts[b]);
  }
  return f;
}

ShallowFeature ExtractShallow(const BlockCrop& crop, const ShallowConfig& config) {
  return PixelHistogram(ToGrayscale(crop), config.normalize);
}

}  // namespace vtlayout
