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

#include "vtlayout/tfe/reader.hpp"

#include <spdlog/spdlog.h>
#include <sys/wait.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <unistd.h>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/image.hpp"
#include "vtlayout/corpus/geometry.hpp"

namespace vtlayout {

namespace {

std::atomic<std::uint64_t> g_scratch_counter{0};

struct PipeResult {
  int status = -1;
  std::string output;
};

PipeResult RunCapture(const std::string& command) {
  PipeResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
  result.status = pclose(pipe);
  return result;
}

}  // namespace

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string GroundTruthReader::Read(const BlockCrop& crop) const {
  const auto& texts = corpus_.block_texts();
  if (crop.source.id >= 0) {
    if (auto it = texts.find(crop.source.id); it != texts.end()) return it->second;
  }
  const auto& anns = corpus_.annotations();
  double best = kDefaultMatchThreshold;
  std::string text;
  for (std::size_t i : corpus_.AnnotationIndicesOn(crop.source.page_id)) {
    const double v = Iou(crop.source.bbox, anns[i].bbox);
    if (v >= best) {
      if (auto it = texts.find(anns[i].id); it != texts.end()) {
        if (v > best || text.empty()) text = it->second;
        best = v;
      }
    }
  }
  return text;
}

ExternalProcessReader::ExternalProcessReader(std::string command_template, std::filesystem::path scratch_dir)
    : command_template_(std::move(command_template)), scratch_dir_(std::move(scratch_dir)) {}

void ExternalProcessReader::CheckAvailable() const {
  if (command_template_.find("{input}") == std::string::npos) {
    Fail(ErrorKind::kConfiguration, "tfe.ocr_command must contain an {input} placeholder");
  }
  const auto first = command_template_.find_first_of(" \t");
  const std::string program = command_template_.substr(0, first);
  if (program.empty() || program == "{input}") Fail(ErrorKind::kConfiguration, "tfe.ocr_command names no program");
  const PipeResult probe = RunCapture("command -v " + ShellQuote(program) + " >/dev/null 2>&1; echo $?");
  if (probe.output.empty() || probe.output[0] != '0') {
    Fail(ErrorKind::kConfiguration, "OCR program '" + program + "' is not available");
  }
}

std::string ExternalProcessReader::Read(const BlockCrop& crop) const {
  std::error_code ec;
  std::filesystem::create_directories(scratch_dir_, ec);
  const auto path = scratch_dir_ / ("block_" + std::to_string(::getpid()) + "_" +
                                    std::to_string(g_scratch_counter.fetch_add(1)) + ".png");
  try {
    WritePng(path, crop.pixels);
  } catch (const std::exception& e) {
    spdlog::warn("OCR skipped for block {}: {}", crop.source.id, e.what());
    return {};
  }
  std::string command = command_template_;
  for (auto pos = command.find("{input}"); pos != std::string::npos; pos = command.find("{input}")) {
    command.replace(pos, 7, ShellQuote(path.string()));
  }
  command += " 2>/dev/null";
  PipeResult r = RunCapture(command);
  std::filesystem::remove(path, ec);
  if (r.status != 0) {
    spdlog::warn("OCR command failed for block {} (status {}); using empty text", crop.source.id, r.status);
    return {};
  }
  return r.output;
}

}  // namespace vtlayout
