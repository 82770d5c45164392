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
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vtlayout {

// A cached feature vector: dense, or sparse (index, value) pairs for text.
struct FeatureRecord {
  std::string fingerprint;
  std::uint32_t dim = 0;
  bool sparse = false;
  std::vector<float> values;
  std::vector<std::uint32_t> indices;  // sparse only, ascending

  bool operator==(const FeatureRecord&) const = default;
};

std::vector<std::uint8_t> EncodeFeatureRecord(const FeatureRecord& record);
// Throws kIntegrity on damage.
FeatureRecord DecodeFeatureRecord(const std::vector<std::uint8_t>& bytes);

// Files live at <root>/<extractor>/<fingerprint>/<block key>.f32.
class FeatureCache {
 public:
  explicit FeatureCache(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path PathFor(const std::string& extractor, const std::string& fingerprint,
                                const std::string& key) const;

  // Missing, damaged or stale entries read as a miss.
  std::optional<FeatureRecord> Load(const std::string& extractor, const std::string& fingerprint,
                                    const std::string& key) const;
  bool Contains(const std::string& extractor, const std::string& fingerprint, const std::string& key) const;
  void Store(const std::string& extractor, const std::string& key, const FeatureRecord& record) const;

  // Number of record files under the root.
  std::int64_t CountRecords() const;

 private:
  std::filesystem::path root_;
};

}  // namespace vtlayout
