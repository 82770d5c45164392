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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/parallel.hpp"
#include "vtlayout/corpus/synth.hpp"
#include "vtlayout/dvfe/tensor_file.hpp"
#include "vtlayout/evaluation/report.hpp"
#include "vtlayout/pipeline/config.hpp"
#include "vtlayout/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace vtlayout;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string cache_dir;
  int workers = -1;
  bool verbose = false;
  bool quiet = false;
};

PipelineConfig BuildConfig(const GlobalOptions& g, std::vector<std::string> extra) {
  std::vector<std::string> overrides = g.overrides;
  if (!g.cache_dir.empty()) overrides.push_back("cache_dir=" + g.cache_dir);
  if (g.workers >= 0) overrides.push_back("workers=" + std::to_string(g.workers));
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  if (g.config_path.empty()) return ParseConfig("", overrides);
  return LoadConfig(g.config_path, overrides);
}

void WriteText(const fs::path& path, const std::string& text) {
  WriteFileAtomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string ReadText(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  return {bytes.begin(), bytes.end()};
}

void WriteRecord(const ExperimentRecord& record, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::string text = RenderRecord(record);
  WriteText(out_dir / (record.kind + ".txt"), text);
  WriteText(out_dir / (record.kind + ".json"), RecordToJson(record));
  std::cout << text;
}

void PrintStats(const std::string& what, const ExtractionStats& s) {
  spdlog::info("{}: {} records computed, {} served from cache, {} blocks skipped{}", what, s.computed, s.cached,
               s.skipped_blocks, s.interrupted ? " (interrupted)" : "");
}

int CmdSynth(const GlobalOptions& g, const std::string& out, std::optional<int> pages, bool force) {
  std::vector<std::string> extra;
  if (pages) extra.push_back("corpus.pages=" + std::to_string(*pages));
  const PipelineConfig cfg = BuildConfig(g, extra);
  const fs::path dir = out;
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    Fail(ErrorKind::kConfiguration, "output directory " + dir.string() + " is not empty; pass --force to overwrite");
  }
  SynthSpec spec;
  spec.pages = cfg.corpus.pages;
  spec.page_width = cfg.corpus.page_width;
  spec.page_height = cfg.corpus.page_height;
  spec.weights = cfg.corpus.weights;
  const Corpus corpus = GenerateSyntheticCorpus(spec, cfg.seed);
  WriteSyntheticCorpus(corpus, dir, cfg.corpus.validation_fraction, ResolveWorkers(cfg.workers));
  spdlog::info("wrote {} pages and {} blocks to {}", corpus.pages().size(), corpus.annotations().size(),
               dir.string());
  return 0;
}

int CmdExtract(const PipelineConfig& cfg, std::int64_t limit) {
  const CorpusSplits splits = LoadCorpus(cfg);
  const FeatureCache cache(ResolveCacheDir(cfg));
  const FeatureSpace space(cfg, AblationMask::Parse(cfg.train.mask), splits.train, cache);
  ExtractOptions opt;
  ExtractionStats total;
  if (limit >= 0) {
    opt.stop = [&total, limit](const ExtractionStats& s) { return total.computed + s.computed >= limit; };
  }
  for (const Corpus* c : {&splits.train, &splits.val}) {
    const ExtractionStats s = space.Extract(*c, c->annotations(), opt);
    PrintStats(c->split().name(), s);
    total.Add(s);
    if (s.interrupted) break;
  }
  std::cout << "computed " << total.computed << " skipped " << total.cached << (total.interrupted ? " interrupted" : "")
            << "\n";
  return 0;
}

int CmdTrain(const PipelineConfig& cfg, const std::string& model_path, std::string trace_path) {
  const CorpusSplits splits = LoadCorpus(cfg);
  const FeatureCache cache(ResolveCacheDir(cfg));
  const AblationMask mask = AblationMask::Parse(cfg.train.mask);
  const FeatureSpace space(cfg, mask, splits.train, cache);
  ExtractOptions opt;
  opt.compute = false;
  TrainedModel t = TrainOnCorpus(cfg, space, splits.train, mask, nullptr, opt);
  if (fs::path(model_path).has_parent_path()) fs::create_directories(fs::path(model_path).parent_path());
  t.model.Save(model_path);
  if (trace_path.empty()) trace_path = model_path + ".trace.json";
  WriteText(trace_path, TraceToJson(t.trace, ConfigFingerprint(cfg)));
  std::cout << "model " << model_path << " final loss " << t.trace.epoch_loss.back() << "\n";
  return 0;
}

int CmdEvaluate(const PipelineConfig& cfg, const std::string& model_path, const std::string& out_dir) {
  const CorpusSplits splits = LoadCorpus(cfg);
  const FeatureCache cache(ResolveCacheDir(cfg));
  const FusionModel model = FusionModel::Load(model_path);
  const FeatureSpace space(cfg, model.mask(), splits.train, cache);
  auto localizer = MakeLocalizer(cfg, splits.val);
  ExtractionStats stats;
  EvaluationResult r = EvaluateOnCorpus(cfg, space, model, splits.val, *localizer, &stats);
  PrintStats("evaluate", stats);
  ExperimentRecord record;
  record.kind = "evaluate";
  record.config_fingerprint = ConfigFingerprint(cfg);
  record.seed = cfg.seed;
  record.reports.push_back(std::move(r.report));
  WriteRecord(record, out_dir);
  return 0;
}

template <typename Fn>
int CmdExperiment(const PipelineConfig& cfg, const std::string& out_dir, Fn run) {
  const CorpusSplits splits = LoadCorpus(cfg);
  const FeatureCache cache(ResolveCacheDir(cfg));
  ExtractionStats stats;
  const ExperimentRecord record = run(cfg, splits, cache, &stats);
  PrintStats(record.kind, stats);
  WriteRecord(record, out_dir);
  return 0;
}

int CmdReport(const std::vector<std::string>& inputs) {
  for (const auto& in : inputs) std::cout << RenderRecord(RecordFromJson(ReadText(in))) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("vtlayout");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"vtlayout: document layout block classification pipeline"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "JSON config file");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set train.epochs=5")->take_all();
  app.add_option("--cache-dir", g.cache_dir, "Feature cache directory (default: $VTLAYOUT_CACHE_DIR)");
  app.add_option("-j,--workers", g.workers, "Worker threads for extraction (0 = all cores)");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");
  app.add_flag("-q,--quiet", g.quiet, "Warnings and errors only");

  std::string corpus_dir;
  auto corpus_override = [&]() {
    std::vector<std::string> extra;
    if (!corpus_dir.empty()) extra.push_back("corpus.path=" + corpus_dir);
    return extra;
  };

  auto* synth = app.add_subcommand("synth", "Render a synthetic corpus to disk");
  std::string synth_out;
  std::optional<int> synth_pages;
  bool force = false;
  synth->add_option("-o,--out", synth_out, "Output directory")->required();
  synth->add_option("--pages", synth_pages, "Number of pages");
  synth->add_flag("--force", force, "Write into a non-empty directory");

  auto* extract = app.add_subcommand("extract", "Populate the feature cache");
  std::int64_t limit = -1;
  extract->add_option("--corpus", corpus_dir, "Corpus directory");
  extract->add_option("--limit", limit, "Stop after computing this many records");

  auto* train = app.add_subcommand("train", "Train a fusion model from cached features");
  std::string model_path;
  std::string trace_path;
  train->add_option("--corpus", corpus_dir, "Corpus directory");
  train->add_option("-m,--model", model_path, "Model file to write")->required();
  train->add_option("--trace", trace_path, "Loss trace file (default: <model>.trace.json)");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on the validation split");
  std::string out_dir = "reports";
  evaluate->add_option("--corpus", corpus_dir, "Corpus directory");
  evaluate->add_option("-m,--model", model_path, "Model file")->required();
  evaluate->add_option("-o,--out", out_dir, "Report directory");

  auto* ablate = app.add_subcommand("ablate", "Train and score all seven extractor masks");
  ablate->add_option("--corpus", corpus_dir, "Corpus directory");
  ablate->add_option("-o,--out", out_dir, "Report directory");

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  cv->add_option("--corpus", corpus_dir, "Corpus directory");
  cv->add_option("-o,--out", out_dir, "Report directory");

  auto* sample = app.add_subcommand("sample", "Compare the full training split with its ratio-scaled sample");
  sample->add_option("--corpus", corpus_dir, "Corpus directory");
  sample->add_option("-o,--out", out_dir, "Report directory");

  auto* report = app.add_subcommand("report", "Render stored report records as tables");
  std::vector<std::string> inputs;
  report->add_option("inputs", inputs, "Record JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*synth) return CmdSynth(g, synth_out, synth_pages, force);
    if (*report) return CmdReport(inputs);
    const PipelineConfig cfg = BuildConfig(g, corpus_override());
    if (*extract) return CmdExtract(cfg, limit);
    if (*train) return CmdTrain(cfg, model_path, trace_path);
    if (*evaluate) return CmdEvaluate(cfg, model_path, out_dir);
    if (*ablate) return CmdExperiment(cfg, out_dir, RunAblationExperiment);
    if (*cv) return CmdExperiment(cfg, out_dir, RunCrossValidationExperiment);
    if (*sample) return CmdExperiment(cfg, out_dir, RunSmallSampleExperiment);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
