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

#include "vtlayout/pipeline/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <json.hpp>
#include <mutex>
#include <unordered_map>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"
#include "vtlayout/common/parallel.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/corpus/coco.hpp"
#include "vtlayout/corpus/crop.hpp"
#include "vtlayout/corpus/geometry.hpp"
#include "vtlayout/corpus/synth.hpp"
#include "vtlayout/dvfe/deep.hpp"
#include "vtlayout/dvfe/preprocess.hpp"
#include "vtlayout/dvfe/pretrain.hpp"
#include "vtlayout/evaluation/experiments.hpp"
#include "vtlayout/svfe/shallow.hpp"
#include "vtlayout/tfe/text_feature.hpp"

namespace vtlayout {
namespace {

// Dispatches page loads to the source that owns each page.
class RoutedPageSource : public PageSource {
 public:
  void Route(const std::string& page_id, std::shared_ptr<const PageSource> source) {
    routes_[page_id] = std::move(source);
  }
  Image Load(const PageInfo& page) const override {
    auto it = routes_.find(page.page_id);
    if (it == routes_.end() || !it->second) Fail(ErrorKind::kLookup, "no image source for page " + page.page_id);
    return it->second->Load(page);
  }

 private:
  std::unordered_map<std::string, std::shared_ptr<const PageSource>> routes_;
};

Corpus LoadSplit(const std::filesystem::path& root, const std::string& file, const std::string& images, Split split,
                 const std::map<std::int64_t, std::string>& texts) {
  auto source = std::make_shared<DirectoryPageSource>(root / images);
  Corpus c = LoadCocoAnnotations(root / file, split, source);
  std::map<std::int64_t, std::string> own;
  for (const auto& a : c.annotations()) {
    if (auto it = texts.find(a.id); it != texts.end()) own.emplace(a.id, it->second);
  }
  return Corpus(c.pages(), c.annotations(), split, std::move(own), source);
}

std::vector<PretrainSample> PretrainSamples(const Corpus& train, int workers) {
  const auto& pages = train.pages();
  std::vector<std::vector<PretrainSample>> per_page(pages.size());
  ParallelFor(pages.size(), workers, [&](std::size_t p) {
    const auto anns = train.AnnotationsOn(pages[p].page_id);
    if (anns.empty()) return;
    const PageImage img = train.LoadPage(pages[p].page_id);
    for (const auto& crop : CropBlocks(img, anns).crops) {
      if (crop.label) per_page[p].push_back(MakePretrainSample(crop));
    }
  });
  std::vector<PretrainSample> out;
  for (auto& v : per_page) {
    for (auto& s : v) out.push_back(std::move(s));
  }
  return out;
}

std::shared_ptr<const Backbone> MakeBackbone(const PipelineConfig& cfg, const Corpus& train,
                                             const FeatureCache& cache) {
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<Backbone> bb;
  if (!cfg.dvfe.weights_path.empty()) {
    bb = LoadBackbone(cfg.dvfe.weights_path);
    if (bb->architecture() != cfg.dvfe.backbone) {
      Fail(ErrorKind::kConfiguration, "weights file holds a " + bb->architecture() + " backbone, config asks for " +
                                          cfg.dvfe.backbone);
    }
    return bb;
  }
  if (cfg.dvfe.pretrain_epochs == 0) {
    bb = BuildBackbone(cfg.dvfe.backbone);
    InitializeBackbone(*bb, BackboneSeed(cfg));
    return bb;
  }
  Fnv1a h;
  h.Update("backbone/v2").Update(cfg.dvfe.backbone).UpdateU64(BackboneSeed(cfg));
  h.UpdateU64(static_cast<std::uint64_t>(cfg.dvfe.pretrain_epochs));
  h.UpdateU64(static_cast<std::uint64_t>(cfg.dvfe.pretrain_batch_size)).UpdateDouble(cfg.dvfe.pretrain_lr);
  for (const auto& a : train.annotations()) {
    h.Update(BlockKey(a.page_id, a.bbox)).UpdateU64(a.category ? CategoryCode(*a.category) + 1 : 0);
  }
  const auto path = cache.root() / "backbone" / (h.hex() + ".vtlt");
  if (std::filesystem::exists(path)) {
    try {
      bb = LoadBackbone(path);
      if (bb->architecture() == cfg.dvfe.backbone) return bb;
    } catch (const Error& e) {
      spdlog::warn("retraining damaged backbone {}: {}", path.string(), e.what());
    }
  }
  bb = BuildBackbone(cfg.dvfe.backbone);
  InitializeBackbone(*bb, BackboneSeed(cfg));
  const auto samples = PretrainSamples(train, ResolveWorkers(cfg.workers));
  PretrainConfig pc;
  pc.epochs = cfg.dvfe.pretrain_epochs;
  pc.batch_size = cfg.dvfe.pretrain_batch_size;
  pc.learning_rate = cfg.dvfe.pretrain_lr;
  pc.seed = BackboneSeed(cfg);
  const PretrainResult r = PretrainBackbone(*bb, samples, pc);
  std::filesystem::create_directories(path.parent_path());
  SaveBackbone(*bb, path);
  spdlog::info("pretrained {} backbone on {} blocks in {:.1f}s, accuracy {:.4f}", bb->architecture(), samples.size(),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), r.final_accuracy);
  return bb;
}

TextConfig MakeTextConfig(const PipelineConfig& cfg) {
  TextConfig t;
  t.upscale_factor = cfg.tfe.upscale_factor;
  t.max_upscale_pixels = cfg.tfe.max_upscale_pixels;
  return t;
}

FeatureRecord DenseRecord(const std::string& fp, const double* v, std::size_t n) {
  FeatureRecord r;
  r.fingerprint = fp;
  r.dim = static_cast<std::uint32_t>(n);
  r.values.assign(v, v + n);
  return r;
}

FeatureRecord SparseRecord(const std::string& fp, const TextFeature& t) {
  FeatureRecord r;
  r.fingerprint = fp;
  r.sparse = true;
  r.dim = static_cast<std::uint32_t>(t.dim);
  for (const auto& [i, v] : t.entries) {
    r.indices.push_back(static_cast<std::uint32_t>(i));
    r.values.push_back(static_cast<float>(v));
  }
  return r;
}

std::vector<double> ToDoubles(const FeatureRecord& r) { return {r.values.begin(), r.values.end()}; }

TextFeature ToText(const FeatureRecord& r) {
  TextFeature t;
  t.dim = static_cast<int>(r.dim);
  t.entries.reserve(r.values.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) t.entries.emplace_back(static_cast<int>(r.indices[i]), r.values[i]);
  return t;
}

bool Covers(const AblationMask& outer, const AblationMask& inner) {
  return (outer.deep || !inner.deep) && (outer.shallow || !inner.shallow) && (outer.text || !inner.text);
}

TrainConfig MakeTrainConfig(const PipelineConfig& cfg) {
  TrainConfig t;
  t.batch_size = cfg.train.batch_size;
  t.epochs = cfg.train.epochs;
  t.learning_rate = cfg.train.lr;
  t.seed = TrainSeed(cfg);
  t.class_weights = cfg.train.class_weights;
  t.weight_decay = cfg.train.weight_decay;
  t.standardize = cfg.train.standardize;
  return t;
}

std::string TrainingFingerprint(const PipelineConfig& cfg) {
  return SectionFingerprint(cfg, {"seed", "corpus", "svfe", "dvfe", "tfe", "train"});
}

}  // namespace

CorpusSplits LoadCorpus(const PipelineConfig& cfg) {
  if (cfg.corpus.path.empty()) {
    SynthSpec spec;
    spec.pages = cfg.corpus.pages;
    spec.page_width = cfg.corpus.page_width;
    spec.page_height = cfg.corpus.page_height;
    spec.weights = cfg.corpus.weights;
    Corpus full = GenerateSyntheticCorpus(spec, cfg.seed);
    auto [train, val] = SplitPages(full, cfg.corpus.validation_fraction);
    return {std::move(full), std::move(train), std::move(val)};
  }
  const std::filesystem::path root = cfg.corpus.path;
  std::map<std::int64_t, std::string> texts;
  if (!cfg.corpus.texts_file.empty() && std::filesystem::exists(root / cfg.corpus.texts_file)) {
    texts = LoadBlockTexts(root / cfg.corpus.texts_file);
  }
  Corpus train = LoadSplit(root, cfg.corpus.train_file, cfg.corpus.train_images, Split{SplitKind::kTrain}, texts);
  Corpus val = LoadSplit(root, cfg.corpus.val_file, cfg.corpus.val_images, Split{SplitKind::kValidation}, texts);
  Corpus full = MergeCorpora(train, val);
  return {std::move(full), std::move(train), std::move(val)};
}

Corpus MergeCorpora(const Corpus& a, const Corpus& b) {
  std::vector<PageInfo> pages = a.pages();
  pages.insert(pages.end(), b.pages().begin(), b.pages().end());
  std::vector<BlockAnnotation> anns = a.annotations();
  anns.insert(anns.end(), b.annotations().begin(), b.annotations().end());
  std::map<std::int64_t, std::string> texts = a.block_texts();
  for (const auto& [id, t] : b.block_texts()) {
    if (!texts.emplace(id, t).second) Fail(ErrorKind::kIntegrity, "annotation id " + std::to_string(id) + " in both corpora");
  }
  std::unordered_map<std::int64_t, int> seen;
  for (const auto& x : anns) {
    if (x.id >= 0 && ++seen[x.id] > 1) {
      Fail(ErrorKind::kIntegrity, "annotation id " + std::to_string(x.id) + " in both corpora");
    }
  }
  std::shared_ptr<const PageSource> source;
  if (a.source() == b.source()) {
    source = a.source();
  } else {
    auto routed = std::make_shared<RoutedPageSource>();
    for (const auto& p : a.pages()) routed->Route(p.page_id, a.source());
    for (const auto& p : b.pages()) routed->Route(p.page_id, b.source());
    source = routed;
  }
  return Corpus(std::move(pages), std::move(anns), Split{SplitKind::kTrain}, std::move(texts), source);
}

std::string ExtractorName(Extractor e) {
  switch (e) {
    case Extractor::kDeep: return "dvfe";
    case Extractor::kShallow: return "svfe";
    case Extractor::kText: return "tfe";
  }
  return "unknown";
}

std::vector<Extractor> ExtractorsFor(const AblationMask& mask) {
  std::vector<Extractor> out;
  if (mask.deep) out.push_back(Extractor::kDeep);
  if (mask.shallow) out.push_back(Extractor::kShallow);
  if (mask.text) out.push_back(Extractor::kText);
  return out;
}

void ExtractionStats::Add(const ExtractionStats& o) {
  computed += o.computed;
  cached += o.cached;
  skipped_blocks += o.skipped_blocks;
  interrupted = interrupted || o.interrupted;
}

FeatureSpace::FeatureSpace(const PipelineConfig& config, const AblationMask& mask, const Corpus& train,
                           const FeatureCache& cache, std::shared_ptr<const Backbone> backbone)
    : config_(config), mask_(mask), cache_(cache), backbone_(std::move(backbone)) {
  if (!mask_.any()) Fail(ErrorKind::kConfiguration, "feature space needs at least one extractor");
  if (mask_.shallow) {
    Fnv1a h;
    h.Update("svfe/v1").UpdateU64(config_.svfe.normalize ? 1 : 0);
    fingerprints_[Extractor::kShallow] = h.hex();
  }
  if (mask_.deep) {
    if (!backbone_) backbone_ = MakeBackbone(config_, train, cache_);
    Fnv1a h;
    h.Update("dvfe/v1").Update(backbone_->architecture()).UpdateU64(backbone_->Fingerprint()).UpdateU64(kDeepInputSize);
    fingerprints_[Extractor::kDeep] = h.hex();
  }
  if (mask_.text) {
    auto reader = MakeReader(train);
    reader->CheckAvailable();
    const TextConfig tcfg = MakeTextConfig(config_);
    const bool pixels = reader->UsesPixels();
    Fnv1a id;
    id.Update("tfe/v1").Update(reader->name()).Update(config_.tfe.reader == "external" ? config_.tfe.ocr_command : "");
    id.UpdateU64(pixels ? static_cast<std::uint64_t>(tcfg.upscale_factor) : 0);
    id.UpdateU64(pixels ? static_cast<std::uint64_t>(tcfg.max_upscale_pixels) : 0);
    Fnv1a vh = id;
    vh.Update("vocab").UpdateU64(static_cast<std::uint64_t>(config_.tfe.max_vocab));
    for (const auto& a : train.annotations()) vh.Update(BlockKey(a.page_id, a.bbox));
    const auto path = cache_.root() / "vocab" / (vh.hex() + ".tsv");
    if (std::filesystem::exists(path)) {
      try {
        vocab_ = LoadVocabulary(path);
      } catch (const Error& e) {
        spdlog::warn("refitting damaged vocabulary {}: {}", path.string(), e.what());
      }
    }
    if (!vocab_) {
      std::vector<std::string> docs;
      docs.reserve(train.annotations().size());
      for (const auto& page : train.pages()) {
        const auto anns = train.AnnotationsOn(page.page_id);
        if (anns.empty()) continue;
        if (pixels) {
          const PageImage img = train.LoadPage(page.page_id);
          for (const auto& crop : CropBlocks(img, anns).crops) docs.push_back(ReadBlockText(crop, *reader, tcfg));
        } else {
          for (const auto& a : anns) {
            BlockCrop crop;
            crop.source = a;
            crop.label = a.category;
            docs.push_back(ReadBlockText(crop, *reader, tcfg));
          }
        }
      }
      vocab_ = FitTfidf(docs, config_.tfe.max_vocab);
      std::filesystem::create_directories(path.parent_path());
      SaveVocabulary(*vocab_, path);
      spdlog::debug("fitted vocabulary of {} terms on {} blocks", vocab_->size(), docs.size());
    }
    id.UpdateU64(vocab_->Fingerprint());
    fingerprints_[Extractor::kText] = id.hex();
  }
}

int FeatureSpace::deep_channels() const { return backbone_ && mask_.deep ? backbone_->channels() : 0; }
int FeatureSpace::vocab_size() const { return vocab_ ? vocab_->size() : 0; }

std::string FeatureSpace::Fingerprint(Extractor e) const {
  auto it = fingerprints_.find(e);
  if (it == fingerprints_.end()) Fail(ErrorKind::kConfiguration, ExtractorName(e) + " is not part of this feature space");
  return it->second;
}

std::map<std::string, std::string> FeatureSpace::Fingerprints() const {
  std::map<std::string, std::string> out;
  for (const auto& [e, fp] : fingerprints_) out[ExtractorName(e)] = fp;
  return out;
}

std::unique_ptr<TextReader> FeatureSpace::MakeReader(const Corpus& corpus) const {
  if (config_.tfe.reader == "ground_truth") return std::make_unique<GroundTruthReader>(corpus);
  if (config_.tfe.reader == "external") {
    return std::make_unique<ExternalProcessReader>(config_.tfe.ocr_command, cache_.root() / "scratch");
  }
  return std::make_unique<NullReader>();
}

BundleSet FeatureSpace::Bundles(const Corpus& corpus, std::span<const BlockAnnotation> blocks, ExtractionStats* stats,
                                const ExtractOptions& options, bool with_images) const {
  return Run(corpus, blocks, stats, options, with_images, true);
}

ExtractionStats FeatureSpace::Extract(const Corpus& corpus, std::span<const BlockAnnotation> blocks,
                                      const ExtractOptions& options) const {
  ExtractionStats stats;
  Run(corpus, blocks, &stats, options, false, false);
  return stats;
}

BundleSet FeatureSpace::Run(const Corpus& corpus, std::span<const BlockAnnotation> blocks, ExtractionStats* stats,
                            const ExtractOptions& options, bool with_images, bool want_bundles) const {
  const auto extractors = ExtractorsFor(mask_);
  std::vector<std::string> page_order;
  std::unordered_map<std::string, std::vector<std::size_t>> by_page;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto [it, fresh] = by_page.try_emplace(blocks[i].page_id);
    if (fresh) page_order.push_back(blocks[i].page_id);
    it->second.push_back(i);
  }
  std::unique_ptr<TextReader> reader = mask_.text ? MakeReader(corpus) : nullptr;
  const TextConfig tcfg = MakeTextConfig(config_);

  std::vector<std::optional<FeatureBundle>> out(want_bundles ? blocks.size() : 0);
  std::vector<std::vector<std::string>> misses(page_order.size());
  ExtractionStats total;
  std::mutex mu;
  std::atomic<bool> stopped{false};

  ParallelFor(page_order.size(), ResolveWorkers(config_.workers), [&](std::size_t p) {
    if (stopped.load()) return;
    const std::string& pid = page_order[p];
    const PageInfo* info = corpus.FindPage(pid);
    if (info == nullptr) Fail(ErrorKind::kLookup, "block refers to unknown page " + pid);
    ExtractionStats local;
    struct Item {
      std::size_t index;
      std::string key;
      std::array<std::optional<FeatureRecord>, 3> records;
    };
    std::vector<Item> items;
    std::vector<std::size_t> todo;
    for (std::size_t i : by_page[pid]) {
      if (ClampToPage(blocks[i].bbox, info->width, info->height).empty()) {
        ++local.skipped_blocks;
        continue;
      }
      Item item{i, BlockKey(pid, blocks[i].bbox), {}};
      bool missing = false;
      for (Extractor e : extractors) {
        auto rec = cache_.Load(ExtractorName(e), fingerprints_.at(e), item.key);
        if (rec) {
          ++local.cached;
        } else {
          missing = true;
          if (!options.compute) misses[p].push_back(item.key + " (" + ExtractorName(e) + ")");
        }
        item.records[static_cast<int>(e)] = std::move(rec);
      }
      if ((missing && options.compute) || (with_images && want_bundles)) todo.push_back(items.size());
      items.push_back(std::move(item));
    }
    std::vector<std::optional<Tensor3>> images(items.size());
    if (!todo.empty()) {
      const PageImage page = corpus.LoadPage(pid);
      std::vector<BlockAnnotation> anns;
      for (std::size_t t : todo) anns.push_back(blocks[items[t].index]);
      CropResult cropped = CropBlocks(page, anns);
      if (!cropped.skipped.empty()) Fail(ErrorKind::kData, "block lost its area while cropping on page " + pid);
      for (std::size_t k = 0; k < todo.size(); ++k) {
        Item& item = items[todo[k]];
        const BlockCrop& crop = cropped.crops[k];
        for (Extractor e : extractors) {
          auto& slot = item.records[static_cast<int>(e)];
          if (slot) continue;
          const std::string& fp = fingerprints_.at(e);
          FeatureRecord rec;
          if (e == Extractor::kDeep) {
            const auto v = PooledEmbedding(crop, *backbone_);
            rec = DenseRecord(fp, v.data(), v.size());
          } else if (e == Extractor::kShallow) {
            const auto v = ExtractShallow(crop, ShallowConfig{config_.svfe.normalize});
            rec = DenseRecord(fp, v.values.data(), v.values.size());
          } else {
            rec = SparseRecord(fp, ExtractTextFeature(crop, *reader, *vocab_, tcfg));
          }
          cache_.Store(ExtractorName(e), item.key, rec);
          ++local.computed;
          slot = std::move(rec);
        }
        if (with_images && want_bundles) images[todo[k]] = PadResize(crop).pixels;
      }
    }
    if (want_bundles && misses[p].empty()) {
      for (std::size_t k = 0; k < items.size(); ++k) {
        const Item& item = items[k];
        const BlockAnnotation& a = blocks[item.index];
        FeatureBundle b;
        b.block_id = a.id;
        b.label = a.category;
        if (const auto& r = item.records[static_cast<int>(Extractor::kDeep)]) b.deep = ToDoubles(*r);
        if (const auto& r = item.records[static_cast<int>(Extractor::kShallow)]) b.shallow = ToDoubles(*r);
        if (const auto& r = item.records[static_cast<int>(Extractor::kText)]) b.text = ToText(*r);
        if (images[k]) b.image = std::move(images[k]);
        out[item.index] = std::move(b);
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    total.Add(local);
    if (options.stop && !stopped.load() && options.stop(total)) stopped = true;
  });

  if (stopped.load()) total.interrupted = true;
  if (stats) stats->Add(total);

  std::vector<std::string> all_misses;
  for (auto& m : misses) all_misses.insert(all_misses.end(), m.begin(), m.end());
  if (!all_misses.empty()) {
    std::string msg = std::to_string(all_misses.size()) + " feature records missing from the cache; run extract first:";
    const std::size_t show = std::min<std::size_t>(all_misses.size(), 20);
    for (std::size_t i = 0; i < show; ++i) msg += "\n  " + all_misses[i];
    if (show < all_misses.size()) msg += "\n  ... and " + std::to_string(all_misses.size() - show) + " more";
    Fail(ErrorKind::kData, msg);
  }

  BundleSet set;
  if (want_bundles && !total.interrupted) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!out[i]) continue;
      set.bundles.push_back(std::move(*out[i]));
      set.source_index.push_back(i);
    }
  }
  return set;
}

TrainedModel TrainOnCorpus(const PipelineConfig& config, const FeatureSpace& space, const Corpus& train,
                           const AblationMask& mask, ExtractionStats* stats, const ExtractOptions& options) {
  if (!Covers(space.mask(), mask)) {
    Fail(ErrorKind::kConfiguration, "mask " + mask.Code() + " needs extractors outside " + space.mask().Code());
  }
  const bool trainable = config.dvfe.trainable && mask.deep;
  BundleSet set = space.Bundles(train, train.annotations(), stats, options, trainable);
  if (set.bundles.empty()) Fail(ErrorKind::kData, "training split has no usable blocks");
  FusionModel model = FusionModel::Build(mask, space.deep_channels(), space.vocab_size(), TrainSeed(config),
                                         config.dvfe.se_ratio);
  if (trainable) model.AttachTrainableBackbone(std::make_unique<Backbone>(*space.backbone()));
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult trace = Train(model, set.bundles, MakeTrainConfig(config), [&](int epoch, double loss) {
    spdlog::debug("{} epoch {} loss {:.6f}", mask.Code(), epoch + 1, loss);
  });
  spdlog::info("trained {} on {} blocks in {:.1f}s, final loss {:.5f}", mask.Code(), set.bundles.size(),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
               trace.epoch_loss.empty() ? 0.0 : trace.epoch_loss.back());
  for (Extractor e : ExtractorsFor(mask)) model.fingerprints()[ExtractorName(e)] = space.Fingerprint(e);
  model.fingerprints()["config"] = TrainingFingerprint(config);
  return {std::move(model), std::move(trace)};
}

std::unique_ptr<Localizer> MakeLocalizer(const PipelineConfig& config, const Corpus& corpus) {
  const auto& l = config.localizer;
  if (l.kind == "ground_truth") return std::make_unique<GroundTruthLocalizer>(corpus);
  if (l.kind == "detection_file") return DetectionFileLocalizer::FromFile(l.detections_path, l.score_floor);
  if (l.kind == "perturbed") {
    return std::make_unique<PerturbedLocalizer>(corpus, l.jitter, l.drop_rate, LocalizerSeed(config));
  }
  Fail(ErrorKind::kConfiguration, "unknown localizer kind " + l.kind);
}

EvaluationResult EvaluateOnCorpus(const PipelineConfig& config, const FeatureSpace& space, const FusionModel& model,
                                  const Corpus& corpus, const Localizer& localizer, ExtractionStats* stats) {
  if (!Covers(space.mask(), model.mask())) {
    Fail(ErrorKind::kCompatibility, "model mask " + model.mask().Code() + " needs extractors outside " +
                                        space.mask().Code());
  }
  for (Extractor e : ExtractorsFor(model.mask())) {
    const std::string name = ExtractorName(e);
    auto it = model.fingerprints().find(name);
    if (it == model.fingerprints().end() || it->second != space.Fingerprint(e)) {
      Fail(ErrorKind::kCompatibility, "model was trained on different " + name + " features (" +
                                          (it == model.fingerprints().end() ? std::string("none") : it->second) +
                                          " vs " + space.Fingerprint(e) + ")");
    }
  }
  if (model.mask().deep && model.deep_channels() != space.deep_channels()) {
    Fail(ErrorKind::kCompatibility, "model expects " + std::to_string(model.deep_channels()) + " deep channels");
  }
  if (model.mask().text && model.vocab_size() != space.vocab_size()) {
    Fail(ErrorKind::kCompatibility, "model expects a vocabulary of " + std::to_string(model.vocab_size()) + " terms");
  }

  std::vector<BlockAnnotation> preds;
  std::vector<std::size_t> page_of;
  for (std::size_t p = 0; p < corpus.pages().size(); ++p) {
    const PageImage page = corpus.LoadPage(corpus.pages()[p].page_id);
    for (auto& box : localizer.Localize(page)) {
      box.page_id = page.page_id;
      box.category.reset();
      preds.push_back(std::move(box));
      page_of.push_back(p);
    }
  }
  const bool trainable = model.trainable_backbone();
  BundleSet set = space.Bundles(corpus, preds, stats, {}, trainable);
  const auto predictions = model.PredictAll(set.bundles);

  std::vector<std::vector<BlockAnnotation>> kept(corpus.pages().size());
  std::vector<std::vector<Category>> kept_cat(corpus.pages().size());
  for (std::size_t k = 0; k < set.bundles.size(); ++k) {
    const std::size_t i = set.source_index[k];
    kept[page_of[i]].push_back(preds[i]);
    kept_cat[page_of[i]].push_back(predictions[k].category);
  }
  EvaluationResult result;
  const double threshold = config.eval.match_threshold;
  for (std::size_t p = 0; p < corpus.pages().size(); ++p) {
    std::vector<BlockAnnotation> gts;
    for (auto& a : corpus.AnnotationsOn(corpus.pages()[p].page_id)) {
      if (a.category) gts.push_back(std::move(a));
    }
    std::vector<bool> gt_used(gts.size(), false);
    for (const auto& m : MatchPredictions(kept[p], gts, threshold)) {
      if (m.gt) {
        gt_used[*m.gt] = true;
        result.pairs.push_back({gts[*m.gt].category, kept_cat[p][m.pred]});
      } else {
        result.pairs.push_back({std::nullopt, kept_cat[p][m.pred]});
      }
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gt_used[g]) result.pairs.push_back({gts[g].category, std::nullopt});
    }
  }
  result.report = Prf(Confusion(result.pairs), ParseUnmatchedPolicy(config.eval.unmatched));
  result.report.label = model.mask().Label();
  result.report.config_fingerprint = ConfigFingerprint(config);
  return result;
}

std::string TraceToJson(const TrainResult& trace, const std::string& fingerprint) {
  nlohmann::json j = {{"config_fingerprint", fingerprint}, {"epoch_loss", trace.epoch_loss}};
  return j.dump(2) + "\n";
}

namespace {

ExperimentRecord NewRecord(const PipelineConfig& config, const std::string& kind) {
  ExperimentRecord r;
  r.kind = kind;
  r.config_fingerprint = ConfigFingerprint(config);
  r.seed = config.seed;
  return r;
}

EvalReport TrainAndScore(const PipelineConfig& config, const FeatureSpace& space, const Corpus& train,
                         const Corpus& test, const AblationMask& mask, ExtractionStats* stats, double* final_loss) {
  TrainedModel t = TrainOnCorpus(config, space, train, mask, stats);
  if (final_loss && !t.trace.epoch_loss.empty()) *final_loss = t.trace.epoch_loss.back();
  auto localizer = MakeLocalizer(config, test);
  return EvaluateOnCorpus(config, space, t.model, test, *localizer, stats).report;
}

}  // namespace

ExperimentRecord RunSingleExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                     const FeatureCache& cache, ExtractionStats* stats) {
  const AblationMask mask = AblationMask::Parse(config.train.mask);
  FeatureSpace space(config, mask, splits.train, cache);
  ExperimentRecord r = NewRecord(config, "evaluate");
  double loss = 0.0;
  r.reports.push_back(TrainAndScore(config, space, splits.train, splits.val, mask, stats, &loss));
  r.summary["final_loss"] = loss;
  return r;
}

ExperimentRecord RunAblationExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                       const FeatureCache& cache, ExtractionStats* stats) {
  FeatureSpace space(config, FullMask(), splits.train, cache);
  ExperimentRecord r = NewRecord(config, "ablation");
  for (auto& row : RunAblation([&](const AblationMask& mask) {
         return TrainAndScore(config, space, splits.train, splits.val, mask, stats, nullptr);
       })) {
    r.reports.push_back(std::move(row.report));
  }
  return r;
}

ExperimentRecord RunCrossValidationExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                              const FeatureCache& cache, ExtractionStats* stats) {
  const AblationMask mask = AblationMask::Parse(config.train.mask);
  const Corpus& full = splits.full;
  auto cv = FiveFoldCv(
      full, config.seed,
      [&](int fold, const std::vector<std::size_t>& train_idx, const std::vector<std::size_t>& test_idx) {
        const Corpus train = full.SubsetAnnotations(train_idx, Split{SplitKind::kFold, fold});
        const Corpus test = full.SubsetAnnotations(test_idx, Split{SplitKind::kFold, fold});
        FeatureSpace space(config, mask, train, cache);
        return TrainAndScore(config, space, train, test, mask, stats, nullptr);
      },
      config.eval.folds);
  ExperimentRecord r = NewRecord(config, "cv");
  r.reports = std::move(cv.folds);
  r.fold_assignment = std::move(cv.assignment.fold_of);
  r.summary["mean_macro_f1"] = cv.mean_macro_f1;
  for (Category c : kAllCategories) r.summary["mean_f1." + std::string(CategoryName(c))] = cv.mean_f1[CategoryCode(c)];
  return r;
}

ExperimentRecord RunSmallSampleExperiment(const PipelineConfig& config, const CorpusSplits& splits,
                                          const FeatureCache& cache, ExtractionStats* stats) {
  const AblationMask mask = AblationMask::Parse(config.train.mask);
  SmallSample sample = SmallDatasetSample(splits.train, config.seed);
  FeatureSpace full_space(config, mask, splits.train, cache);
  EvalReport full = TrainAndScore(config, full_space, splits.train, splits.val, mask, stats, nullptr);
  full.label = "full";
  FeatureSpace small_space(config, mask, sample.corpus, cache);
  EvalReport small = TrainAndScore(config, small_space, sample.corpus, splits.val, mask, stats, nullptr);
  small.label = "sample";
  ExperimentRecord r = NewRecord(config, "small_sample");
  r.summary["scale_factor"] = sample.scale_factor;
  r.summary["macro_f1_drop"] = full.macro_f1 - small.macro_f1;
  for (Category c : kAllCategories) {
    r.summary["sampled." + std::string(CategoryName(c))] = static_cast<double>(sample.taken[CategoryCode(c)]);
  }
  r.reports = {std::move(full), std::move(small)};
  return r;
}

}  // namespace vtlayout
