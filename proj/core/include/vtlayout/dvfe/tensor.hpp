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

#include <cstddef>
#include <vector>

namespace vtlayout {

// Height x width x channels, channels fastest.
struct Tensor3 {
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int height, int width, int channels, double fill = 0.0)
      : h(height), w(width), c(channels), data(static_cast<std::size_t>(height) * width * channels, fill) {}

  std::size_t index(int y, int x, int ch) const { return (static_cast<std::size_t>(y) * w + x) * c + ch; }
  double& at(int y, int x, int ch) { return data[index(y, x, ch)]; }
  double at(int y, int x, int ch) const { return data[index(y, x, ch)]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor3& o) const { return h == o.h && w == o.w && c == o.c; }
  bool operator==(const Tensor3&) const = default;
};

using FeatureMap = Tensor3;

}  // namespace vtlayout
