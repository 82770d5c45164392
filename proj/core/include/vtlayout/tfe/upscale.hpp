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

#include "vtlayout/corpus/types.hpp"

namespace vtlayout {

enum class UpscaleMode { kBicubic, kNearest };

inline constexpr int kDefaultUpscaleFactor = 8;
inline constexpr std::int64_t kDefaultMaxUpscalePixels = 64LL * 1000 * 1000;

// Largest factor <= `factor` whose output stays within `max_pixels` (at least 1).
int FittingUpscaleFactor(int width, int height, int factor, std::int64_t max_pixels);

Image UpscaleImage(const Image& image, int factor, UpscaleMode mode = UpscaleMode::kBicubic);

// Enlarges the crop pixels; metadata is carried over unchanged. Reduces the
// factor with a warning when the result would exceed `max_pixels`.
BlockCrop UpscaleBlock(const BlockCrop& crop, int factor = kDefaultUpscaleFactor,
                       UpscaleMode mode = UpscaleMode::kBicubic,
                       std::int64_t max_pixels = kDefaultMaxUpscalePixels);

}  // namespace vtlayout
