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
#include <optional>
#include <string>

#include "vtlayout/common/image.hpp"
#include "vtlayout/corpus/category.hpp"

namespace vtlayout {

// Axis-aligned box in pixel units, (x, y) is the top-left corner.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  bool operator==(const BBox&) const = default;
};

// Integer pixel rectangle, always inside the raster it refers to.
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  bool operator==(const PixelRect&) const = default;
};

// A labelled ground-truth box or an (optionally labelled) detection.
struct BlockAnnotation {
  std::int64_t id = -1;
  std::string page_id;
  BBox bbox;
  std::optional<Category> category;
  std::optional<double> score;

  bool operator==(const BlockAnnotation&) const = default;
};

struct PageImage {
  std::string page_id;
  Image pixels;  // RGB

  int width() const { return pixels.width; }
  int height() const { return pixels.height; }
};

struct BlockCrop {
  BlockAnnotation source;
  PixelRect region;
  Image pixels;  // RGB, region.w x region.h
  std::optional<Category> label;
};

// Stable key for a block: page id plus a digest of the box coordinates. A
// ground-truth block and a detection with the identical box share a key.
std::string BlockKey(const std::string& page_id, const BBox& bbox);

}  // namespace vtlayout
