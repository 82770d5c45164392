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

#include "vtlayout/evaluation/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <json.hpp>

#include "vtlayout/common/error.hpp"

namespace vtlayout {
namespace {

using nlohmann::json;

std::string Rule(std::size_t width) { return std::string(width, '-') + "\n"; }

std::size_t LabelWidth(std::span<const EvalReport> reports, std::size_t floor) {
  std::size_t w = floor;
  for (const auto& r : reports) w = std::max(w, r.label.size());
  return w;
}

json MetricsToJson(const CategoryMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"precision_undefined", m.precision_undefined},
          {"recall_undefined", m.recall_undefined}};
}

CategoryMetrics MetricsFromJson(const json& j) {
  CategoryMetrics m;
  m.tp = j.at("tp").get<std::int64_t>();
  m.fp = j.at("fp").get<std::int64_t>();
  m.fn = j.at("fn").get<std::int64_t>();
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.precision_undefined = j.at("precision_undefined").get<bool>();
  m.recall_undefined = j.at("recall_undefined").get<bool>();
  return m;
}

json CountsToJson(const CategoryCounts& c) { return json(std::vector<std::int64_t>(c.begin(), c.end())); }

CategoryCounts CountsFromJson(const json& j) {
  const auto v = j.get<std::vector<std::int64_t>>();
  if (v.size() != kNumCategories) Fail(ErrorKind::kSchema, "category count array must have 5 entries");
  CategoryCounts c{};
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

json ReportToJson(const EvalReport& r) {
  json per = json::object();
  for (Category c : kAllCategories) per[std::string(CategoryName(c))] = MetricsToJson(r.per_category[CategoryCode(c)]);
  json matrix = json::array();
  for (const auto& row : r.confusion.counts) matrix.push_back(CountsToJson(row));
  return {{"label", r.label},
          {"policy", UnmatchedPolicyName(r.policy)},
          {"config_fingerprint", r.config_fingerprint},
          {"per_category", per},
          {"macro", {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}}},
          {"confusion",
           {{"counts", matrix},
            {"unmatched_gt", CountsToJson(r.confusion.unmatched_gt)},
            {"unmatched_pred", CountsToJson(r.confusion.unmatched_pred)}}}};
}

EvalReport ReportFromJson(const json& j) {
  EvalReport r;
  r.label = j.at("label").get<std::string>();
  r.policy = ParseUnmatchedPolicy(j.at("policy").get<std::string>());
  r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  const auto& per = j.at("per_category");
  for (Category c : kAllCategories) {
    r.per_category[CategoryCode(c)] = MetricsFromJson(per.at(std::string(CategoryName(c))));
  }
  const auto& macro = j.at("macro");
  r.macro_precision = macro.at("precision").get<double>();
  r.macro_recall = macro.at("recall").get<double>();
  r.macro_f1 = macro.at("f1").get<double>();
  const auto& conf = j.at("confusion");
  const auto& rows = conf.at("counts");
  if (!rows.is_array() || rows.size() != kNumCategories) Fail(ErrorKind::kSchema, "confusion matrix must be 5x5");
  for (int i = 0; i < kNumCategories; ++i) r.confusion.counts[i] = CountsFromJson(rows[i]);
  r.confusion.unmatched_gt = CountsFromJson(conf.at("unmatched_gt"));
  r.confusion.unmatched_pred = CountsFromJson(conf.at("unmatched_pred"));
  return r;
}

}  // namespace

std::string RenderReportTable(const EvalReport& report) {
  std::string out;
  const std::string header = fmt::format("{:<8} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8}\n", "Category", "Precision",
                                         "Recall", "F1", "TP", "FP", "FN");
  if (!report.label.empty()) out += report.label + "\n";
  out += header;
  out += Rule(header.size() - 1);
  for (Category c : kAllCategories) {
    const auto& m = report.per_category[CategoryCode(c)];
    out += fmt::format("{:<8} {:>9.4f} {:>9.4f} {:>9.4f} {:>8} {:>8} {:>8}\n", CategoryName(c), m.precision, m.recall,
                       m.f1, m.tp, m.fp, m.fn);
  }
  out += Rule(header.size() - 1);
  out += fmt::format("{:<8} {:>9.4f} {:>9.4f} {:>9.4f}\n", "Macro", report.macro_precision, report.macro_recall,
                     report.macro_f1);
  std::int64_t ugt = 0;
  std::int64_t upred = 0;
  for (int c = 0; c < kNumCategories; ++c) {
    ugt += report.confusion.unmatched_gt[c];
    upred += report.confusion.unmatched_pred[c];
  }
  out += fmt::format("matched {}  unmatched_gt {}  unmatched_pred {}  policy {}\n", report.confusion.matched(), ugt,
                     upred, UnmatchedPolicyName(report.policy));
  return out;
}

std::string RenderF1Table(std::span<const EvalReport> reports, bool average_row, const std::string& average_label) {
  const std::size_t lw = LabelWidth(reports, std::max<std::size_t>(7, average_label.size()));
  std::string header = fmt::format("{:<{}}", "", lw);
  for (Category c : kAllCategories) header += fmt::format(" {:>7}", CategoryName(c));
  header += fmt::format(" {:>7}\n", "Average");
  std::string out = header + Rule(header.size() - 1);
  std::array<double, kNumCategories> sums{};
  double macro_sum = 0.0;
  for (const auto& r : reports) {
    out += fmt::format("{:<{}}", r.label, lw);
    for (int c = 0; c < kNumCategories; ++c) {
      out += fmt::format(" {:>7.4f}", r.per_category[c].f1);
      sums[c] += r.per_category[c].f1;
    }
    out += fmt::format(" {:>7.4f}\n", r.macro_f1);
    macro_sum += r.macro_f1;
  }
  if (average_row && !reports.empty()) {
    const double n = static_cast<double>(reports.size());
    out += Rule(header.size() - 1);
    out += fmt::format("{:<{}}", average_label, lw);
    for (double s : sums) out += fmt::format(" {:>7.4f}", s / n);
    out += fmt::format(" {:>7.4f}\n", macro_sum / n);
  }
  return out;
}

std::string RenderComparisonTable(std::span<const EvalReport> reports) {
  std::size_t cw = 7;
  for (const auto& r : reports) cw = std::max(cw, r.label.size());
  std::string header = fmt::format("{:<8}", "");
  for (const auto& r : reports) header += fmt::format(" {:>{}}", r.label, cw);
  header += "\n";
  std::string out = header + Rule(header.size() - 1);
  for (Category c : kAllCategories) {
    out += fmt::format("{:<8}", CategoryName(c));
    for (const auto& r : reports) out += fmt::format(" {:>{}.4f}", r.per_category[CategoryCode(c)].f1, cw);
    out += "\n";
  }
  out += fmt::format("{:<8}", "Macro");
  for (const auto& r : reports) out += fmt::format(" {:>{}.4f}", r.macro_f1, cw);
  out += "\n";
  return out;
}

std::string RecordToJson(const ExperimentRecord& record) {
  json reports = json::array();
  for (const auto& r : record.reports) reports.push_back(ReportToJson(r));
  json j = {{"kind", record.kind},
            {"config_fingerprint", record.config_fingerprint},
            {"seed", record.seed},
            {"reports", reports},
            {"fold_assignment", record.fold_assignment},
            {"summary", record.summary},
            {"notes", record.notes}};
  return j.dump(2) + "\n";
}

ExperimentRecord RecordFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report record: ") + e.what(), static_cast<std::int64_t>(e.byte));
  }
  try {
    ExperimentRecord r;
    r.kind = j.at("kind").get<std::string>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& rep : j.at("reports")) r.reports.push_back(ReportFromJson(rep));
    r.fold_assignment = j.at("fold_assignment").get<std::vector<int>>();
    r.summary = j.at("summary").get<std::map<std::string, double>>();
    r.notes = j.at("notes").get<std::map<std::string, std::string>>();
    return r;
  } catch (const json::exception& e) {
    Fail(ErrorKind::kSchema, std::string("report record: ") + e.what());
  }
}

std::string RenderRecord(const ExperimentRecord& record) {
  std::string out = fmt::format("experiment {}  seed {}  config {}\n\n", record.kind, record.seed,
                                record.config_fingerprint);
  if (record.reports.size() == 1) {
    out += RenderReportTable(record.reports.front());
  } else if (!record.reports.empty()) {
    out += RenderF1Table(record.reports, record.kind == "cv");
  }
  if (!record.summary.empty()) {
    out += "\n";
    for (const auto& [k, v] : record.summary) out += fmt::format("{} {:.6f}\n", k, v);
  }
  for (const auto& [k, v] : record.notes) out += fmt::format("{}: {}\n", k, v);
  return out;
}

}  // namespace vtlayout
