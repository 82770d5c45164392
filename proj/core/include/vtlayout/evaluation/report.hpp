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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vtlayout/evaluation/metrics.hpp"

namespace vtlayout {

// Five category rows plus a macro row; precision, recall, F1 and tallies.
std::string RenderReportTable(const EvalReport& report);

// One row per report (mask, fold, ...) with per-category F1 and the average.
// When `average_row` is set a final row holds the unweighted column means.
std::string RenderF1Table(std::span<const EvalReport> reports, bool average_row = false,
                          const std::string& average_label = "Average");

// Categories as rows, one F1 column per report.
std::string RenderComparisonTable(std::span<const EvalReport> reports);

// One experiment's structured record.
struct ExperimentRecord {
  std::string kind;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  std::vector<EvalReport> reports;
  std::vector<int> fold_assignment;
  std::map<std::string, double> summary;
  std::map<std::string, std::string> notes;

  bool operator==(const ExperimentRecord&) const = default;
};

std::string RecordToJson(const ExperimentRecord& record);
ExperimentRecord RecordFromJson(const std::string& text);

// The record's human-readable rendering.
std::string RenderRecord(const ExperimentRecord& record);

}  // namespace vtlayout
