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

#include "vtlayout/corpus/crop.hpp"

#include <cstring>

#include "vtlayout/common/error.hpp"
#include "vtlayout/corpus/geometry.hpp"

namespace vtlayout {

Image CropImage(const Image& image, const PixelRect& rect) {
  Image out(rect.w, rect.h, image.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(rect.w) * image.channels;
  for (int y = 0; y < rect.h; ++y) {
    std::memcpy(out.data.data() + y * row_bytes, image.data.data() + image.offset(rect.x, rect.y + y), row_bytes);
  }
  return out;
}

CropResult CropBlocks(const PageImage& page, std::span<const BlockAnnotation> annotations) {
  CropResult result;
  for (const auto& a : annotations) {
    if (a.page_id != page.page_id) {
      Fail(ErrorKind::kInput, "annotation " + std::to_string(a.id) + " belongs to page " + a.page_id +
                                  ", not " + page.page_id);
    }
    const PixelRect rect = ClampToPage(a.bbox, page.width(), page.height());
    if (rect.empty()) {
      result.skipped.push_back({a.id, "zero area after clamping to page bounds"});
      continue;
    }
    BlockCrop crop;
    crop.source = a;
    crop.region = rect;
    crop.pixels = CropImage(page.pixels, rect);
    crop.label = a.category;
    result.crops.push_back(std::move(crop));
  }
  return result;
}

}  // namespace vtlayout
