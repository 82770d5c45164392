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

#include "vtlayout/pipeline/feature_cache.hpp"

#include <cstring>
#include <system_error>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"
#include "vtlayout/dvfe/tensor_file.hpp"

namespace vtlayout {
namespace {

constexpr char kMagic[4] = {'V', 'T', 'L', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr const char* kExtension = ".f32";

template <typename T>
void Put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}

  template <typename T>
  T Get() {
    if (limit_ - pos_ < sizeof(T)) Fail(ErrorKind::kIntegrity, "feature record truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string GetString(std::size_t n) {
    if (limit_ - pos_ < n) Fail(ErrorKind::kIntegrity, "feature record truncated");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> EncodeFeatureRecord(const FeatureRecord& r) {
  if (r.sparse && r.indices.size() != r.values.size()) {
    Fail(ErrorKind::kShape, "sparse record needs one index per value");
  }
  if (!r.sparse && r.values.size() != r.dim) Fail(ErrorKind::kShape, "dense record length differs from dim");
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  Put(out, kVersion);
  Put(out, static_cast<std::uint8_t>(r.sparse ? 1 : 0));
  Put(out, r.dim);
  Put(out, static_cast<std::uint32_t>(r.values.size()));
  Put(out, static_cast<std::uint16_t>(r.fingerprint.size()));
  out.insert(out.end(), r.fingerprint.begin(), r.fingerprint.end());
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (r.sparse) Put(out, r.indices[i]);
    Put(out, r.values[i]);
  }
  Fnv1a h;
  h.Update(std::span<const std::uint8_t>(out));
  Put(out, h.digest());
  return out;
}

FeatureRecord DecodeFeatureRecord(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 + 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorKind::kIntegrity, "not a feature record");
  }
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, 8);
  Fnv1a h;
  h.Update(std::span<const std::uint8_t>(bytes.data(), body));
  if (h.digest() != stored) Fail(ErrorKind::kIntegrity, "feature record checksum mismatch");
  Reader in(bytes, body);
  in.GetString(4);
  if (in.Get<std::uint32_t>() != kVersion) Fail(ErrorKind::kIntegrity, "unsupported feature record version");
  FeatureRecord r;
  r.sparse = in.Get<std::uint8_t>() != 0;
  r.dim = in.Get<std::uint32_t>();
  const auto count = in.Get<std::uint32_t>();
  r.fingerprint = in.GetString(in.Get<std::uint16_t>());
  if (!r.sparse && count != r.dim) Fail(ErrorKind::kIntegrity, "dense record length differs from dim");
  const std::size_t per = r.sparse ? 8 : 4;
  if ((body - in.pos()) != per * count) Fail(ErrorKind::kIntegrity, "feature record payload size mismatch");
  r.values.resize(count);
  if (r.sparse) r.indices.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (r.sparse) {
      r.indices[i] = in.Get<std::uint32_t>();
      if (r.indices[i] >= r.dim || (i > 0 && r.indices[i] <= r.indices[i - 1])) {
        Fail(ErrorKind::kIntegrity, "sparse record indices out of order");
      }
    }
    r.values[i] = in.Get<float>();
  }
  return r;
}

FeatureCache::FeatureCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path FeatureCache::PathFor(const std::string& extractor, const std::string& fingerprint,
                                            const std::string& key) const {
  return root_ / extractor / fingerprint / (key + kExtension);
}

std::optional<FeatureRecord> FeatureCache::Load(const std::string& extractor, const std::string& fingerprint,
                                                const std::string& key) const {
  const auto path = PathFor(extractor, fingerprint, key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    FeatureRecord r = DecodeFeatureRecord(ReadFileBytes(path));
    if (r.fingerprint != fingerprint) return std::nullopt;
    return r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool FeatureCache::Contains(const std::string& extractor, const std::string& fingerprint,
                            const std::string& key) const {
  return Load(extractor, fingerprint, key).has_value();
}

void FeatureCache::Store(const std::string& extractor, const std::string& key, const FeatureRecord& record) const {
  const auto path = PathFor(extractor, record.fingerprint, key);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create cache directory " + path.parent_path().string() + ": " + ec.message());
  WriteFileAtomic(path, EncodeFeatureRecord(record));
}

std::int64_t FeatureCache::CountRecords() const {
  std::error_code ec;
  if (!std::filesystem::is_directory(root_, ec)) return 0;
  std::int64_t n = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root_)) {
    if (e.is_regular_file() && e.path().extension() == kExtension) ++n;
  }
  return n;
}

}  // namespace vtlayout
