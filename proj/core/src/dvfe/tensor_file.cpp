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

#include "vtlayout/dvfe/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <thread>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"

namespace vtlayout {

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'V', 'T', 'L', 'T', 'E', 'N', 'S', '1'};
constexpr char kTrailer[8] = {'V', 'T', 'L', 'E', 'N', 'D', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void Raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void Pod(T v) {
    Raw(&v, sizeof(T));
  }
  void Str(const std::string& s) {
    Pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    Raw(s.data(), s.size());
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& in, std::size_t limit) : in_(in), limit_(limit) {}
  void Raw(void* p, std::size_t n) {
    if (pos_ + n > limit_) Fail(ErrorKind::kIntegrity, "tensor file truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T Pod() {
    T v;
    Raw(&v, sizeof(T));
    return v;
  }
  std::string Str(std::size_t max_len) {
    const auto n = Pod<std::uint32_t>();
    if (n > max_len || pos_ + n > limit_) Fail(ErrorKind::kIntegrity, "tensor file truncated");
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

}  // namespace

std::int64_t NamedTensor::numel() const {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
}

const NamedTensor* TensorBundle::Find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<std::uint8_t> SerializeTensors(const TensorBundle& bundle) {
  Writer w;
  w.Raw(kMagic, sizeof(kMagic));
  w.Pod<std::uint32_t>(kVersion);
  w.Pod<std::uint64_t>(bundle.manifest.size());
  w.Raw(bundle.manifest.data(), bundle.manifest.size());
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(bundle.tensors.size()));
  for (const auto& t : bundle.tensors) {
    if (t.numel() != static_cast<std::int64_t>(t.data.size())) {
      Fail(ErrorKind::kShape, "tensor " + t.name + " shape does not match its data length");
    }
    w.Str(t.name);
    w.Pod<std::uint8_t>(static_cast<std::uint8_t>(t.dtype));
    w.Pod<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.Pod<std::uint64_t>(static_cast<std::uint64_t>(d));
    if (t.dtype == TensorDtype::kFloat32) {
      for (double v : t.data) w.Pod<float>(static_cast<float>(v));
    } else {
      w.Raw(t.data.data(), t.data.size() * sizeof(double));
    }
  }
  const std::uint64_t digest = Fnv1a().Update(w.bytes()).digest();
  w.Pod<std::uint64_t>(digest);
  w.Raw(kTrailer, sizeof(kTrailer));
  return std::move(w.bytes());
}

TensorBundle DeserializeTensors(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t kFooter = sizeof(std::uint64_t) + sizeof(kTrailer);
  if (bytes.size() < sizeof(kMagic) + kFooter ||
      std::memcmp(bytes.data() + bytes.size() - sizeof(kTrailer), kTrailer, sizeof(kTrailer)) != 0) {
    Fail(ErrorKind::kIntegrity, "tensor file truncated or missing trailer");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) Fail(ErrorKind::kIntegrity, "not a tensor file");
  const std::size_t body = bytes.size() - kFooter;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (Fnv1a().Update(std::span(bytes.data(), body)).digest() != stored) {
    Fail(ErrorKind::kIntegrity, "tensor file checksum mismatch");
  }
  Reader r(bytes, body);
  char magic[8];
  r.Raw(magic, sizeof(magic));
  const auto version = r.Pod<std::uint32_t>();
  if (version != kVersion) {
    Fail(ErrorKind::kCompatibility, "unsupported tensor file version " + std::to_string(version));
  }
  TensorBundle out;
  const auto manifest_len = r.Pod<std::uint64_t>();
  if (manifest_len > body) Fail(ErrorKind::kIntegrity, "tensor file truncated");
  out.manifest.resize(manifest_len);
  r.Raw(out.manifest.data(), manifest_len);
  const auto count = r.Pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.Str(body);
    const auto dtype = r.Pod<std::uint8_t>();
    if (dtype > 1) Fail(ErrorKind::kIntegrity, "unknown tensor dtype in " + t.name);
    t.dtype = static_cast<TensorDtype>(dtype);
    const auto ndim = r.Pod<std::uint32_t>();
    if (ndim > 8) Fail(ErrorKind::kIntegrity, "implausible rank for tensor " + t.name);
    std::uint64_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      const auto dim = r.Pod<std::uint64_t>();
      t.shape.push_back(static_cast<std::int64_t>(dim));
      numel *= dim;
    }
    const std::size_t elem = t.dtype == TensorDtype::kFloat32 ? sizeof(float) : sizeof(double);
    if (numel > (body - r.pos()) / elem) Fail(ErrorKind::kIntegrity, "tensor file truncated in " + t.name);
    t.data.resize(numel);
    if (t.dtype == TensorDtype::kFloat32) {
      for (auto& v : t.data) v = r.Pod<float>();
    } else {
      r.Raw(t.data.data(), numel * sizeof(double));
    }
    out.tensors.push_back(std::move(t));
  }
  if (r.pos() != body) Fail(ErrorKind::kIntegrity, "trailing bytes in tensor file");
  return out;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileAtomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(tid);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) Fail(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void WriteTensorFile(const std::filesystem::path& path, const TensorBundle& bundle) {
  WriteFileAtomic(path, SerializeTensors(bundle));
}

TensorBundle ReadTensorFile(const std::filesystem::path& path) { return DeserializeTensors(ReadFileBytes(path)); }

}  // namespace vtlayout
