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
#include <stdexcept>
#include <string>
#include <string_view>

namespace vtlayout {

enum class ErrorKind {
  kConfiguration,
  kFormat,
  kSchema,
  kIntegrity,
  kLookup,
  kShape,
  kInput,
  kData,
  kDegenerate,
  kCompatibility,
  kDivergence,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Process exit code for a failure of the given kind:
// 1 configuration, 2 data, 3 runtime/divergence.
int ExitCodeFor(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Format errors carry the byte offset at which parsing failed, when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::int64_t byte_offset);

  std::int64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::int64_t byte_offset_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& message);

}  // namespace vtlayout
