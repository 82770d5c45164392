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
#include <optional>
#include <string_view>

namespace vtlayout {

// Layout categories. The integer codes are part of every on-disk format.
enum class Category : int { kText = 0, kTitle = 1, kList = 2, kFigure = 3, kTable = 4 };

inline constexpr int kNumCategories = 5;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kText, Category::kTitle, Category::kList, Category::kFigure, Category::kTable};

constexpr int CategoryCode(Category c) { return static_cast<int>(c); }

std::optional<Category> CategoryFromCode(int code);

// "Text", "Title", "List", "Figure", "Table".
std::string_view CategoryName(Category c);

// Case-insensitive inverse of CategoryName.
std::optional<Category> ParseCategory(std::string_view name);

}  // namespace vtlayout
