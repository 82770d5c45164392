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

#include "vtlayout/corpus/corpus.hpp"

#include <cmath>
#include <set>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

std::string Split::name() const {
  switch (kind) {
    case SplitKind::kTrain: return "train";
    case SplitKind::kValidation: return "validation";
    case SplitKind::kFold: return "fold-" + std::to_string(fold);
  }
  return "unknown";
}

Image InMemoryPageSource::Load(const PageInfo& page) const {
  auto it = images_.find(page.page_id);
  if (it == images_.end()) Fail(ErrorKind::kLookup, "page not held in memory: " + page.page_id);
  return it->second;
}

Image DirectoryPageSource::Load(const PageInfo& page) const {
  return ReadImageRgb(root_ / page.file_name);
}

Corpus::Corpus(std::vector<PageInfo> pages, std::vector<BlockAnnotation> annotations, Split split,
               std::map<std::int64_t, std::string> block_texts, std::shared_ptr<const PageSource> source)
    : pages_(std::move(pages)),
      annotations_(std::move(annotations)),
      split_(split),
      block_texts_(std::move(block_texts)),
      source_(std::move(source)) {
  for (std::size_t i = 0; i < pages_.size(); ++i) {
    if (!page_index_.emplace(pages_[i].page_id, i).second) {
      Fail(ErrorKind::kIntegrity, "duplicate page id " + pages_[i].page_id);
    }
  }
  for (std::size_t i = 0; i < annotations_.size(); ++i) {
    const auto& a = annotations_[i];
    if (!page_index_.contains(a.page_id)) {
      Fail(ErrorKind::kIntegrity,
           "annotation " + std::to_string(a.id) + " references unknown page " + a.page_id);
    }
    by_page_[a.page_id].push_back(i);
  }
}

const PageInfo* Corpus::FindPage(const std::string& page_id) const {
  auto it = page_index_.find(page_id);
  return it == page_index_.end() ? nullptr : &pages_[it->second];
}

std::span<const std::size_t> Corpus::AnnotationIndicesOn(const std::string& page_id) const {
  auto it = by_page_.find(page_id);
  if (it == by_page_.end()) return {};
  return it->second;
}

std::vector<BlockAnnotation> Corpus::AnnotationsOn(const std::string& page_id) const {
  std::vector<BlockAnnotation> out;
  for (std::size_t i : AnnotationIndicesOn(page_id)) out.push_back(annotations_[i]);
  return out;
}

PageImage Corpus::LoadPage(const std::string& page_id) const {
  const PageInfo* info = FindPage(page_id);
  if (!info) Fail(ErrorKind::kLookup, "page not in corpus: " + page_id);
  if (!source_) Fail(ErrorKind::kConfiguration, "corpus has no page source");
  PageImage page{page_id, source_->Load(*info)};
  if (page.pixels.channels != 3) Fail(ErrorKind::kData, "page " + page_id + " is not RGB");
  return page;
}

std::array<std::int64_t, kNumCategories> Corpus::CategoryCounts() const {
  std::array<std::int64_t, kNumCategories> counts{};
  for (const auto& a : annotations_) {
    if (a.category) ++counts[static_cast<std::size_t>(CategoryCode(*a.category))];
  }
  return counts;
}

Corpus Corpus::SubsetAnnotations(std::span<const std::size_t> indices, Split split) const {
  std::vector<BlockAnnotation> kept;
  std::set<std::string> page_ids;
  std::map<std::int64_t, std::string> texts;
  for (std::size_t i : indices) {
    const auto& a = annotations_.at(i);
    kept.push_back(a);
    page_ids.insert(a.page_id);
    if (auto it = block_texts_.find(a.id); it != block_texts_.end()) texts.insert(*it);
  }
  std::vector<PageInfo> pages;
  for (const auto& p : pages_) {
    if (page_ids.contains(p.page_id)) pages.push_back(p);
  }
  return Corpus(std::move(pages), std::move(kept), split, std::move(texts), source_);
}

Corpus Corpus::SubsetPages(std::span<const std::size_t> page_indices, Split split) const {
  std::vector<PageInfo> pages;
  std::vector<BlockAnnotation> kept;
  std::map<std::int64_t, std::string> texts;
  for (std::size_t pi : page_indices) {
    const auto& p = pages_.at(pi);
    pages.push_back(p);
    for (std::size_t i : AnnotationIndicesOn(p.page_id)) {
      const auto& a = annotations_[i];
      kept.push_back(a);
      if (auto it = block_texts_.find(a.id); it != block_texts_.end()) texts.insert(*it);
    }
  }
  return Corpus(std::move(pages), std::move(kept), split, std::move(texts), source_);
}

std::pair<Corpus, Corpus> SplitPages(const Corpus& corpus, double validation_fraction) {
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    Fail(ErrorKind::kConfiguration, "validation fraction must be in [0, 1)");
  }
  const std::size_t n = corpus.pages().size();
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < n; ++i) (i < n - n_val ? train_idx : val_idx).push_back(i);
  return {corpus.SubsetPages(train_idx, Split{SplitKind::kTrain}),
          corpus.SubsetPages(val_idx, Split{SplitKind::kValidation})};
}

}  // namespace vtlayout
