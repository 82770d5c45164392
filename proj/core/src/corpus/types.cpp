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

#include "vtlayout/corpus/types.hpp"

#include "vtlayout/common/hash.hpp"

namespace vtlayout {

std::string BlockKey(const std::string& page_id, const BBox& bbox) {
  std::string safe;
  safe.reserve(page_id.size());
  for (char c : page_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    safe.push_back(ok ? c : '_');
  }
  Fnv1a h;
  h.Update(page_id).UpdateDouble(bbox.x).UpdateDouble(bbox.y).UpdateDouble(bbox.w).UpdateDouble(bbox.h);
  return safe + "-" + h.hex();
}

}  // namespace vtlayout
