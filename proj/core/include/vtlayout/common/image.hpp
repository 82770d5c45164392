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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vtlayout {

// Interleaved 8-bit raster, row-major, `channels` samples per pixel.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const { return width <= 0 || height <= 0; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * channels;
  }
  std::uint8_t& at(int x, int y, int c = 0) { return data[offset(x, y) + c]; }
  std::uint8_t at(int x, int y, int c = 0) const { return data[offset(x, y) + c]; }

  bool operator==(const Image&) const = default;
};

// PNG encode/decode (gray, gray+alpha, RGB and RGBA inputs are accepted; alpha
// is dropped). Encoding is deterministic: no timestamps or text chunks.
std::vector<std::uint8_t> EncodePng(const Image& image);
Image DecodePng(const std::vector<std::uint8_t>& bytes);
void WritePng(const std::filesystem::path& path, const Image& image);
Image ReadPng(const std::filesystem::path& path);

Image ReadJpeg(const std::filesystem::path& path);

// Dispatches on the file signature (PNG or JPEG). Always returns RGB.
Image ReadImageRgb(const std::filesystem::path& path);

}  // namespace vtlayout
