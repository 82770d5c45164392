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
#include <vector>

namespace vtlayout {

enum class TensorDtype : std::uint8_t { kFloat32 = 0, kFloat64 = 1 };

struct NamedTensor {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> data;  // row-major
  TensorDtype dtype = TensorDtype::kFloat32;

  std::int64_t numel() const;
};

struct TensorBundle {
  std::string manifest;  // JSON text
  std::vector<NamedTensor> tensors;

  const NamedTensor* Find(const std::string& name) const;
};

std::vector<std::uint8_t> SerializeTensors(const TensorBundle& bundle);
// Throws kIntegrity on truncation, bad magic or checksum mismatch.
TensorBundle DeserializeTensors(const std::vector<std::uint8_t>& bytes);

void WriteTensorFile(const std::filesystem::path& path, const TensorBundle& bundle);
TensorBundle ReadTensorFile(const std::filesystem::path& path);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace vtlayout
