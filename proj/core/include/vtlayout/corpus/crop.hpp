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
#include <string>
#include <vector>

#include "vtlayout/corpus/types.hpp"

namespace vtlayout {

struct SkippedBlock {
  std::int64_t annotation_id;
  std::string reason;
};

struct CropResult {
  std::vector<BlockCrop> crops;  // input order, minus skipped blocks
  std::vector<SkippedBlock> skipped;
};

// One crop per annotation. Boxes overflowing the page are clamped; boxes with
// no area left after clamping are reported in `skipped`. Every annotation must
// reference `page` (kInput otherwise). Crop labels copy the annotation category.
CropResult CropBlocks(const PageImage& page, std::span<const BlockAnnotation> annotations);

Image CropImage(const Image& image, const PixelRect& rect);

}  // namespace vtlayout
