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
#include <filesystem>
#include <string>
#include <vector>

#include "vtlayout/corpus/corpus.hpp"

namespace vtlayout {

struct SynthSpec {
  int pages = 100;
  int page_width = 480;
  int page_height = 640;
  // Expected blocks per page, indexed by category code
  // (Text, Title, List, Figure, Table).
  std::array<double, kNumCategories> weights = {7.0, 2.0, 0.25, 1.0 / 3.0, 1.0 / 3.0};
};

// Throws kConfiguration for non-positive sizes/page counts or weights that are
// negative or all zero.
void ValidateSynthSpec(const SynthSpec& spec);

// Deterministic for a given (spec, seed). Category totals are
// round(weight * pages), spread over randomly chosen pages. Pages are rendered
// lazily by the corpus' page source; block texts carry the rendered strings.
Corpus GenerateSyntheticCorpus(const SynthSpec& spec, std::uint64_t seed);

// Writes images/page_NNNNN.png, train.json, val.json (COCO) and texts.json.
// The last round(validation_fraction * pages) pages form val.json.
void WriteSyntheticCorpus(const Corpus& corpus, const std::filesystem::path& out_dir, double validation_fraction,
                          int workers = 1);

// Draws `text` with the built-in 5x7 bitmap font; returns the advance width.
// Exposed for the tests and for tools that annotate images.
int DrawText(Image& image, int x, int y, const std::string& text, int scale, bool bold, std::uint8_t ink);
int TextWidth(const std::string& text, int scale, bool bold);

}  // namespace vtlayout
