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

#include "vtlayout/corpus/category.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace vtlayout {

namespace {
constexpr std::array<std::string_view, kNumCategories> kNames = {"Text", "Title", "List", "Figure", "Table"};
}  // namespace

std::optional<Category> CategoryFromCode(int code) {
  if (code < 0 || code >= kNumCategories) return std::nullopt;
  return static_cast<Category>(code);
}

std::string_view CategoryName(Category c) { return kNames[static_cast<std::size_t>(CategoryCode(c))]; }

std::optional<Category> ParseCategory(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (Category c : kAllCategories) {
    std::string candidate(CategoryName(c));
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (candidate == lowered) return c;
  }
  return std::nullopt;
}

}  // namespace vtlayout
