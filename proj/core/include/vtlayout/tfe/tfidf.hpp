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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vtlayout {

inline constexpr int kDefaultMaxVocab = 4096;

// Lowercases ASCII, splits on non-alphanumeric runs and drops tokens shorter
// than two characters. Non-ASCII bytes are kept as token characters.
std::vector<std::string> Tokenize(std::string_view text);

class TfidfVocabulary {
 public:
  TfidfVocabulary() = default;
  TfidfVocabulary(std::vector<std::string> terms, std::vector<double> idf, std::int64_t document_count);

  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  std::int64_t document_count() const { return document_count_; }
  int size() const { return static_cast<int>(terms_.size()); }
  // Index of `term`, or -1.
  int IndexOf(std::string_view term) const;

  std::uint64_t Fingerprint() const;

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::int64_t document_count_ = 0;
};

// Non-negative sparse vector, entries sorted by index.
struct TextFeature {
  int dim = 0;
  std::vector<std::pair<int, double>> entries;

  bool empty() const { return entries.empty(); }
  std::vector<double> Dense() const;
};

// idf = ln((1 + N) / (1 + df)) + 1 over the top `max_vocab` terms by df.
TfidfVocabulary FitTfidf(const std::vector<std::string>& documents, int max_vocab = kDefaultMaxVocab);

TextFeature TransformTfidf(std::string_view text, const TfidfVocabulary& vocab);

void SaveVocabulary(const TfidfVocabulary& vocab, const std::filesystem::path& path);
TfidfVocabulary LoadVocabulary(const std::filesystem::path& path);
std::string VocabularyToText(const TfidfVocabulary& vocab);
TfidfVocabulary VocabularyFromText(const std::string& text);

}  // namespace vtlayout
