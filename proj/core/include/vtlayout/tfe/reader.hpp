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

#include <filesystem>
#include <memory>
#include <string>

#include "vtlayout/corpus/corpus.hpp"
#include "vtlayout/corpus/types.hpp"

namespace vtlayout {

class TextReader {
 public:
  virtual ~TextReader() = default;
  // Never throws on a valid crop; "" means no text found.
  virtual std::string Read(const BlockCrop& crop) const = 0;
  // False when the reader ignores pixel content, so enlargement can be skipped.
  virtual bool UsesPixels() const = 0;
  virtual std::string name() const = 0;
  // Throws kConfiguration when the reader cannot run at all.
  virtual void CheckAvailable() const {}
};

// Reads the sidecar texts of a corpus: by annotation id, else the text of the
// best-overlapping ground-truth block on the same page (IoU >= 0.5).
class GroundTruthReader : public TextReader {
 public:
  explicit GroundTruthReader(const Corpus& corpus) : corpus_(corpus) {}
  std::string Read(const BlockCrop& crop) const override;
  bool UsesPixels() const override { return false; }
  std::string name() const override { return "ground_truth"; }

 private:
  const Corpus& corpus_;
};

// Runs `command_template` with {input} replaced by a temporary PNG of the
// crop and returns its standard output.
class ExternalProcessReader : public TextReader {
 public:
  ExternalProcessReader(std::string command_template, std::filesystem::path scratch_dir);
  std::string Read(const BlockCrop& crop) const override;
  bool UsesPixels() const override { return true; }
  std::string name() const override { return "external"; }
  void CheckAvailable() const override;

 private:
  std::string command_template_;
  std::filesystem::path scratch_dir_;
};

class NullReader : public TextReader {
 public:
  std::string Read(const BlockCrop&) const override { return {}; }
  bool UsesPixels() const override { return false; }
  std::string name() const override { return "null"; }
};

std::string ShellQuote(const std::string& s);

}  // namespace vtlayout
