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

#include "vtlayout/common/error.hpp"

namespace vtlayout {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kIntegrity: return "integrity error";
    case ErrorKind::kLookup: return "lookup error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kDegenerate: return "degenerate input";
    case ErrorKind::kCompatibility: return "compatibility error";
    case ErrorKind::kDivergence: return "divergence error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kCompatibility:
      return 1;
    case ErrorKind::kFormat:
    case ErrorKind::kSchema:
    case ErrorKind::kIntegrity:
    case ErrorKind::kLookup:
    case ErrorKind::kInput:
    case ErrorKind::kData:
    case ErrorKind::kDegenerate:
    case ErrorKind::kShape:
      return 2;
    case ErrorKind::kDivergence:
    case ErrorKind::kIo:
      return 3;
  }
  return 3;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message), kind_(kind) {}

FormatError::FormatError(const std::string& message, std::int64_t byte_offset)
    : Error(ErrorKind::kFormat, message + " (at byte " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

void Fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace vtlayout
