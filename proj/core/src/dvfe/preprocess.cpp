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

#include "vtlayout/dvfe/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

PadGeometry SquarePadding(int width, int height) {
  PadGeometry g;
  g.side = std::max(width, height);
  g.pad_left = (g.side - width) / 2;
  g.pad_top = (g.side - height) / 2;
  return g;
}

PaddedInput PadResize(const Image& rgb, int size) {
  if (rgb.empty()) Fail(ErrorKind::kDegenerate, "cannot resize an empty crop");
  if (rgb.channels != 3) Fail(ErrorKind::kData, "deep features expect RGB crops");
  if (size <= 0) Fail(ErrorKind::kConfiguration, "resize target must be positive");
  const PadGeometry g = SquarePadding(rgb.width, rgb.height);
  auto padded = [&](int x, int y, int ch) -> double {
    const int cx = x - g.pad_left;
    const int cy = y - g.pad_top;
    if (cx < 0 || cy < 0 || cx >= rgb.width || cy >= rgb.height) return 255.0;
    return rgb.at(cx, cy, ch);
  };
  const double scale = static_cast<double>(g.side) / size;
  // Per-axis source taps, shared across rows / columns.
  struct Tap {
    int i0, i1;
    double t;
  };
  std::vector<Tap> taps(static_cast<std::size_t>(size));
  for (int d = 0; d < size; ++d) {
    const double s = std::clamp((d + 0.5) * scale - 0.5, 0.0, static_cast<double>(g.side - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, g.side - 1);
    taps[d] = {i0, i1, s - i0};
  }
  PaddedInput out{Tensor3(size, size, 3)};
  for (int y = 0; y < size; ++y) {
    const Tap& ty = taps[y];
    for (int x = 0; x < size; ++x) {
      const Tap& tx = taps[x];
      for (int ch = 0; ch < 3; ++ch) {
        const double top = padded(tx.i0, ty.i0, ch) * (1.0 - tx.t) + padded(tx.i1, ty.i0, ch) * tx.t;
        const double bot = padded(tx.i0, ty.i1, ch) * (1.0 - tx.t) + padded(tx.i1, ty.i1, ch) * tx.t;
        const double v = top * (1.0 - ty.t) + bot * ty.t;
        out.pixels.at(y, x, ch) = std::clamp(v / 255.0, 0.0, 1.0);
      }
    }
  }
  return out;
}

PaddedInput PadResize(const BlockCrop& crop, int size) { return PadResize(crop.pixels, size); }

}  // namespace vtlayout
