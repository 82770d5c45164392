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

#include "vtlayout/tfe/upscale.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

namespace {

// Keys cubic convolution kernel, a = -0.5.
double Cubic(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> CubicTaps(int in, int out, int factor) {
  std::vector<Taps> taps(static_cast<std::size_t>(out));
  for (int d = 0; d < out; ++d) {
    const double s = (d + 0.5) / factor - 0.5;
    const int base = static_cast<int>(std::floor(s));
    const double t = s - base;
    Taps& tp = taps[d];
    for (int k = 0; k < 4; ++k) {
      tp.index[k] = std::clamp(base - 1 + k, 0, in - 1);
      tp.weight[k] = Cubic(t - (k - 1));
    }
  }
  return taps;
}

}  // namespace

int FittingUpscaleFactor(int width, int height, int factor, std::int64_t max_pixels) {
  int f = std::max(factor, 1);
  while (f > 1 && static_cast<std::int64_t>(width) * f * static_cast<std::int64_t>(height) * f > max_pixels) --f;
  return f;
}

Image UpscaleImage(const Image& image, int factor, UpscaleMode mode) {
  if (factor < 1) Fail(ErrorKind::kConfiguration, "upscale factor must be >= 1");
  if (factor == 1 || image.empty()) return image;
  const int ow = image.width * factor;
  const int oh = image.height * factor;
  Image out(ow, oh, image.channels);
  if (mode == UpscaleMode::kNearest) {
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x)
        for (int c = 0; c < image.channels; ++c) out.at(x, y, c) = image.at(x / factor, y / factor, c);
    return out;
  }
  const auto tx = CubicTaps(image.width, ow, factor);
  const auto ty = CubicTaps(image.height, oh, factor);
  // Horizontal pass into a float buffer, then vertical.
  std::vector<double> rows(static_cast<std::size_t>(image.height) * ow * image.channels);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += tx[x].weight[k] * image.at(tx[x].index[k], y, c);
        rows[(static_cast<std::size_t>(y) * ow + x) * image.channels + c] = acc;
      }
    }
  }
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          acc += ty[y].weight[k] * rows[(static_cast<std::size_t>(ty[y].index[k]) * ow + x) * image.channels + c];
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
      }
    }
  }
  return out;
}

BlockCrop UpscaleBlock(const BlockCrop& crop, int factor, UpscaleMode mode, std::int64_t max_pixels) {
  if (factor < 1) Fail(ErrorKind::kConfiguration, "upscale factor must be >= 1");
  const int f = FittingUpscaleFactor(crop.pixels.width, crop.pixels.height, factor, max_pixels);
  if (f != factor) {
    spdlog::warn("block {} upscale reduced from {}x to {}x to stay under {} pixels", crop.source.id, factor, f,
                 max_pixels);
  }
  BlockCrop out;
  out.source = crop.source;
  out.region = crop.region;
  out.label = crop.label;
  out.pixels = UpscaleImage(crop.pixels, f, mode);
  return out;
}

}  // namespace vtlayout
