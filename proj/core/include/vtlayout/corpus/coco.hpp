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

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vtlayout/corpus/corpus.hpp"

namespace vtlayout {

// Category ids used when writing COCO documents (the PubLayNet assignment).
int CocoCategoryId(Category c);

// Parses a COCO-style annotation document (images[], annotations[],
// categories[]). Every annotation must carry a known category.
//   parse failure      -> FormatError with the byte offset
//   unknown category   -> kSchema naming the offender
//   dangling image_id  -> kIntegrity
// Page ids are the decimal image ids. `source` supplies rasters on demand.
Corpus ParseCocoAnnotations(const std::string& json_text, Split split,
                            std::shared_ptr<const PageSource> source = nullptr);
Corpus LoadCocoAnnotations(const std::filesystem::path& path, Split split = {},
                           std::shared_ptr<const PageSource> source = nullptr);

// Detection documents use the same layout; each annotation needs a score and
// may omit category_id. Keyed by page id.
using DetectionMap = std::map<std::string, std::vector<BlockAnnotation>>;
DetectionMap ParseDetections(const std::string& json_text);
DetectionMap LoadDetections(const std::filesystem::path& path);

// Serialises pages + annotations. Scores are written when present.
std::string CocoToJson(const std::vector<PageInfo>& pages, const std::vector<BlockAnnotation>& annotations);
void WriteCoco(const std::filesystem::path& path, const std::vector<PageInfo>& pages,
               const std::vector<BlockAnnotation>& annotations);

// Sidecar {annotation_id: text}.
std::map<std::int64_t, std::string> LoadBlockTexts(const std::filesystem::path& path);
void WriteBlockTexts(const std::filesystem::path& path, const std::map<std::int64_t, std::string>& texts);

}  // namespace vtlayout
