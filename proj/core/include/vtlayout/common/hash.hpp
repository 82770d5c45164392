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
#include <span>
#include <string>
#include <string_view>

namespace vtlayout {

// Incremental FNV-1a (64-bit). Used for config fingerprints, cache keys and
// file trailers; stable across platforms and runs.
class Fnv1a {
 public:
  Fnv1a& Update(std::span<const std::uint8_t> bytes);
  Fnv1a& Update(std::string_view text);
  Fnv1a& UpdateU64(std::uint64_t value);
  Fnv1a& UpdateDouble(double value);

  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t HashBytes(std::string_view bytes);
std::string HexDigest(std::uint64_t value);

}  // namespace vtlayout
