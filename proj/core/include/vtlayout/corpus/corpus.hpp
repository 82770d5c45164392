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
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vtlayout/corpus/types.hpp"

namespace vtlayout {

enum class SplitKind { kTrain, kValidation, kFold };

struct Split {
  SplitKind kind = SplitKind::kTrain;
  int fold = -1;  // only for kFold

  std::string name() const;
  bool operator==(const Split&) const = default;
};

struct PageInfo {
  std::string page_id;
  int width = 0;
  int height = 0;
  std::string file_name;

  bool operator==(const PageInfo&) const = default;
};

// Where page rasters come from. Pages are loaded on demand so that corpora of
// thousands of pages never sit in memory at once.
class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual Image Load(const PageInfo& page) const = 0;
};

class InMemoryPageSource : public PageSource {
 public:
  void Add(const std::string& page_id, Image image) { images_[page_id] = std::move(image); }
  Image Load(const PageInfo& page) const override;

 private:
  std::map<std::string, Image> images_;
};

// Resolves PageInfo::file_name against a directory; PNG and JPEG supported.
class DirectoryPageSource : public PageSource {
 public:
  explicit DirectoryPageSource(std::filesystem::path root) : root_(std::move(root)) {}
  Image Load(const PageInfo& page) const override;

 private:
  std::filesystem::path root_;
};

// Pages, their block annotations, a split tag and (synthetic corpora only)
// ground-truth block texts keyed by annotation id. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  // Validates that page ids are unique and that every annotation resolves to
  // a page; throws kIntegrity otherwise.
  Corpus(std::vector<PageInfo> pages, std::vector<BlockAnnotation> annotations, Split split,
         std::map<std::int64_t, std::string> block_texts, std::shared_ptr<const PageSource> source);

  const std::vector<PageInfo>& pages() const { return pages_; }
  const std::vector<BlockAnnotation>& annotations() const { return annotations_; }
  const Split& split() const { return split_; }
  const std::map<std::int64_t, std::string>& block_texts() const { return block_texts_; }
  const std::shared_ptr<const PageSource>& source() const { return source_; }

  const PageInfo* FindPage(const std::string& page_id) const;
  // Indices into annotations() for the given page, in annotation order.
  std::span<const std::size_t> AnnotationIndicesOn(const std::string& page_id) const;
  std::vector<BlockAnnotation> AnnotationsOn(const std::string& page_id) const;

  // Throws kLookup if the page is unknown, kConfiguration without a source.
  PageImage LoadPage(const std::string& page_id) const;

  std::array<std::int64_t, kNumCategories> CategoryCounts() const;

  // Keeps only the listed annotations (and the pages they live on).
  Corpus SubsetAnnotations(std::span<const std::size_t> indices, Split split) const;
  // Keeps the listed pages and all of their annotations.
  Corpus SubsetPages(std::span<const std::size_t> page_indices, Split split) const;

 private:
  std::vector<PageInfo> pages_;
  std::vector<BlockAnnotation> annotations_;
  Split split_;
  std::map<std::int64_t, std::string> block_texts_;
  std::shared_ptr<const PageSource> source_;
  std::unordered_map<std::string, std::size_t> page_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_page_;
};

// Last round(fraction * N) pages become the validation split.
std::pair<Corpus, Corpus> SplitPages(const Corpus& corpus, double validation_fraction);

}  // namespace vtlayout
