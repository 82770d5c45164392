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

#include "vtlayout/common/hash.hpp"

#include <bit>
#include <cstdio>

namespace vtlayout {

namespace {
constexpr std::uint64_t kPrime = 0x100000001b3ULL;
}  // namespace

Fnv1a& Fnv1a::Update(std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes) {
    state_ ^= b;
    state_ *= kPrime;
  }
  return *this;
}

Fnv1a& Fnv1a::Update(std::string_view text) {
  for (char c : text) {
    state_ ^= static_cast<std::uint8_t>(c);
    state_ *= kPrime;
  }
  return *this;
}

Fnv1a& Fnv1a::UpdateU64(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xffU;
    state_ *= kPrime;
  }
  return *this;
}

Fnv1a& Fnv1a::UpdateDouble(double value) { return UpdateU64(std::bit_cast<std::uint64_t>(value)); }

std::string Fnv1a::hex() const { return HexDigest(state_); }

std::uint64_t HashBytes(std::string_view bytes) { return Fnv1a().Update(bytes).digest(); }

std::string HexDigest(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace vtlayout
