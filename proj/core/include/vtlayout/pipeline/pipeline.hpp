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
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vtlayout/corpus/corpus.hpp"
#include "vtlayout/dvfe/backbone.hpp"
#include "vtlayout/evaluation/metrics.hpp"
#include "vtlayout/evaluation/report.hpp"
#include "vtlayout/fusion/model.hpp"
#include "vtlayout/fusion/train.hpp"
#include "vtlayout/localization/localizer.hpp"
#include "vtlayout/pipeline/config.hpp"
#include "vtlayout/pipeline/feature_cache.hpp"
#include "vtlayout/tfe/reader.hpp"
#include "vtlayout/tfe/tfidf.hpp"

namespace vtlayout {

struct CorpusSplits {
  Corpus full;
  Corpus train;
  Corpus val;
};

// Reads corpus.path (COCO files plus images), or generates the synthetic
// corpus in memory when the path is empty.
CorpusSplits LoadCorpus(const PipelineConfig& config);

// Pages and annotations of both corpora; page and annotation ids must not
// collide.
Corpus MergeCorpora(const Corpus& a, const Corpus& b);

enum class Extractor { kDeep, kShallow, kText };

std::string ExtractorName(Extractor e);  // dvfe, svfe, tfe
std::vector<Extractor> ExtractorsFor(const AblationMask& mask);

struct ExtractionStats {
  std::int64_t computed = 0;  // records written
  std::int64_t cached = 0;    // records served from the cache
  std::int64_t skipped_blocks = 0;
  bool interrupted = false;

  void Add(const ExtractionStats& other);
};

struct ExtractOptions {
  // Missing records are computed and stored; otherwise they are an error.
  bool compute = true;
  // Polled between pages; returning true stops extraction early.
  std::function<bool(const ExtractionStats&)> stop;
};

struct BundleSet {
  std::vector<FeatureBundle> bundles;
  std::vector<std::size_t> source_index;  // into the requested blocks
};

// Extractors, their fingerprints and the cache they read and fill.
class FeatureSpace {
 public:
  // Builds (or adopts) the backbone when the mask uses DVFE and loads or fits
  // the vocabulary on `train` when it uses TFE.
  FeatureSpace(const PipelineConfig& config, const AblationMask& mask, const Corpus& train,
               const FeatureCache& cache, std::shared_ptr<const Backbone> backbone = nullptr);

  const AblationMask& mask() const { return mask_; }
  int deep_channels() const;
  int vocab_size() const;
  const Backbone* backbone() const { return backbone_.get(); }
  std::shared_ptr<const Backbone> shared_backbone() const { return backbone_; }
  const TfidfVocabulary* vocabulary() const { return vocab_ ? &*vocab_ : nullptr; }
  std::string Fingerprint(Extractor e) const;
  std::map<std::string, std::string> Fingerprints() const;

  // Features for `blocks` (all on pages of `corpus`). Blocks with no area on
  // their page are left out. Without options.compute a miss throws kData
  // listing the missing (block, extractor) pairs.
  BundleSet Bundles(const Corpus& corpus, std::span<const BlockAnnotation> blocks, ExtractionStats* stats = nullptr,
                    const ExtractOptions& options = {}, bool with_images = false) const;

  // Fills the cache only.
  ExtractionStats Extract(const Corpus& corpus, std::span<const BlockAnnotation> blocks,
                          const ExtractOptions& options = {}) const;

 private:
  std::unique_ptr<TextReader> MakeReader(const Corpus& corpus) const;
  BundleSet Run(const Corpus& corpus, std::span<const BlockAnnotation> blocks, ExtractionStats* stats,
                const ExtractOptions& options, bool with_images, bool want_bundles) const;

  PipelineConfig config_;
  AblationMask mask_;
  const FeatureCache& cache_;
  std::shared_ptr<const Backbone> backbone_;
  std::optional<TfidfVocabulary> vocab_;
  std::map<Extractor, std::string> fingerprints_;
};

struct TrainedModel {
  FusionModel model;
  TrainResult trace;
};

TrainedModel TrainOnCorpus(const PipelineConfig& config, const FeatureSpace& space, const Corpus& train,
                           const AblationMask& mask, ExtractionStats* stats = nullptr,
                           const ExtractOptions& options = {});

std::unique_ptr<Localizer> MakeLocalizer(const PipelineConfig& config, const Corpus& corpus);

struct EvaluationResult {
  EvalReport report;
  std::vector<ClassifiedPair> pairs;
};

// Localize, match, classify, tally and score every page of `corpus`.
// Throws kCompatibility when the model was trained on other features.
EvaluationResult EvaluateOnCorpus(const PipelineConfig& config, const FeatureSpace& space, const FusionModel& model,
                                  const Corpus& corpus, const Localizer& localizer, ExtractionStats* stats = nullptr);

// Loss trace file contents.
std::string TraceToJson(const TrainResult& trace, const std::string& fingerprint);

ExperimentRecord RunAblationExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                       const FeatureCache& cache, ExtractionStats* stats = nullptr);
ExperimentRecord RunCrossValidationExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                              const FeatureCache& cache, ExtractionStats* stats = nullptr);
// Trains on the full training split and on its ratio-scaled sample and
// evaluates both on the validation split.
ExperimentRecord RunSmallSampleExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                          const FeatureCache& cache, ExtractionStats* stats = nullptr);
// One training on the train split, scored on the validation split.
ExperimentRecord RunSingleExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                     const FeatureCache& cache, ExtractionStats* stats = nullptr);

}  // namespace vtlayout
