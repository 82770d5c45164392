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

#include "vtlayout/tfe/reader.hpp"
#include "vtlayout/tfe/tfidf.hpp"
#include "vtlayout/tfe/upscale.hpp"

namespace vtlayout {

struct TextConfig {
  int upscale_factor = kDefaultUpscaleFactor;
  std::int64_t max_upscale_pixels = kDefaultMaxUpscalePixels;
};

std::string ReadBlockText(const BlockCrop& crop, const TextReader& reader, const TextConfig& config = {});

TextFeature ExtractTextFeature(const BlockCrop& crop, const TextReader& reader, const TfidfVocabulary& vocab,
                               const TextConfig& config = {});

}  // namespace vtlayout
