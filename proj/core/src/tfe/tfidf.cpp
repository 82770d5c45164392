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

#include "vtlayout/tfe/tfidf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"

namespace vtlayout {

namespace {

bool IsTokenByte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

std::size_t CodePoints(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (CodePoints(current) >= 2) tokens.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsTokenByte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TfidfVocabulary::TfidfVocabulary(std::vector<std::string> terms, std::vector<double> idf,
                                 std::int64_t document_count)
    : terms_(std::move(terms)), idf_(std::move(idf)), document_count_(document_count) {
  if (terms_.size() != idf_.size()) Fail(ErrorKind::kShape, "vocabulary terms and idf differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) Fail(ErrorKind::kSchema, "vocabulary terms must be sorted and unique");
    if (!(idf_[i] > 0.0) || !std::isfinite(idf_[i])) Fail(ErrorKind::kSchema, "idf values must be positive");
  }
}

int TfidfVocabulary::IndexOf(std::string_view term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return -1;
  return static_cast<int>(it - terms_.begin());
}

std::uint64_t TfidfVocabulary::Fingerprint() const { return HashBytes(VocabularyToText(*this)); }

std::vector<double> TextFeature::Dense() const {
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [i, v] : entries) out[i] = v;
  return out;
}

TfidfVocabulary FitTfidf(const std::vector<std::string>& documents, int max_vocab) {
  if (max_vocab <= 0) Fail(ErrorKind::kConfiguration, "max_vocab must be positive");
  std::map<std::string, std::int64_t> df;
  for (const auto& doc : documents) {
    const auto tokens = Tokenize(doc);
    for (const auto& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
  }
  if (df.empty()) Fail(ErrorKind::kData, "cannot fit TF-IDF: every document is empty");
  std::vector<std::pair<std::string, std::int64_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(ranked.size()) > max_vocab) ranked.resize(static_cast<std::size_t>(max_vocab));
  std::sort(ranked.begin(), ranked.end());
  const auto n = static_cast<std::int64_t>(documents.size());
  std::vector<std::string> terms;
  std::vector<double> idf;
  for (const auto& [term, count] : ranked) {
    terms.push_back(term);
    idf.push_back(std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return TfidfVocabulary(std::move(terms), std::move(idf), n);
}

TextFeature TransformTfidf(std::string_view text, const TfidfVocabulary& vocab) {
  std::map<int, double> counts;
  for (const auto& t : Tokenize(text)) {
    const int i = vocab.IndexOf(t);
    if (i >= 0) counts[i] += 1.0;
  }
  TextFeature f;
  f.dim = vocab.size();
  double norm_sq = 0.0;
  for (auto& [i, c] : counts) {
    c *= vocab.idf()[static_cast<std::size_t>(i)];
    norm_sq += c * c;
  }
  if (norm_sq == 0.0) return f;
  const double norm = std::sqrt(norm_sq);
  for (const auto& [i, c] : counts) f.entries.emplace_back(i, c / norm);
  return f;
}

std::string VocabularyToText(const TfidfVocabulary& vocab) {
  std::string out = "# N=" + std::to_string(vocab.document_count()) + "\n";
  char buf[64];
  for (int i = 0; i < vocab.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", vocab.idf()[static_cast<std::size_t>(i)]);
    out += vocab.terms()[static_cast<std::size_t>(i)];
    out += '\t';
    out += buf;
    out += '\n';
  }
  return out;
}

TfidfVocabulary VocabularyFromText(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> terms;
  std::vector<double> idf;
  std::int64_t n = 0;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    if (line.rfind("# N=", 0) == 0) {
      n = std::strtoll(line.c_str() + 4, nullptr, 10);
      continue;
    }
    if (line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("vocabulary line " + std::to_string(line_no) + " is not term<TAB>idf", line_start);
    }
    char* end = nullptr;
    const double v = std::strtod(line.c_str() + tab + 1, &end);
    if (end == line.c_str() + tab + 1) {
      throw FormatError("vocabulary line " + std::to_string(line_no) + " has no idf value", line_start + tab + 1);
    }
    terms.push_back(line.substr(0, tab));
    idf.push_back(v);
  }
  return TfidfVocabulary(std::move(terms), std::move(idf), n);
}

void SaveVocabulary(const TfidfVocabulary& vocab, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out << VocabularyToText(vocab);
}

TfidfVocabulary LoadVocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return VocabularyFromText(ss.str());
}

}  // namespace vtlayout
