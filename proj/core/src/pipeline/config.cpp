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

#include "vtlayout/pipeline/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/fusion/model.hpp"
#include "vtlayout/evaluation/metrics.hpp"

namespace vtlayout {
namespace {

using nlohmann::json;

json OptionalSeed(const std::optional<std::uint64_t>& s) { return s ? json(*s) : json(nullptr); }

json ToJson(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["cache_dir"] = c.cache_dir;
  j["workers"] = c.workers;
  j["corpus"] = {{"path", c.corpus.path},
                 {"train_file", c.corpus.train_file},
                 {"val_file", c.corpus.val_file},
                 {"train_images", c.corpus.train_images},
                 {"val_images", c.corpus.val_images},
                 {"texts_file", c.corpus.texts_file},
                 {"pages", c.corpus.pages},
                 {"page_width", c.corpus.page_width},
                 {"page_height", c.corpus.page_height},
                 {"weights", c.corpus.weights},
                 {"validation_fraction", c.corpus.validation_fraction}};
  j["localizer"] = {{"kind", c.localizer.kind},
                    {"detections_path", c.localizer.detections_path},
                    {"score_floor", c.localizer.score_floor},
                    {"jitter", c.localizer.jitter},
                    {"drop_rate", c.localizer.drop_rate},
                    {"seed", OptionalSeed(c.localizer.seed)}};
  j["svfe"] = {{"normalize", c.svfe.normalize}};
  j["dvfe"] = {{"backbone", c.dvfe.backbone},
               {"weights_path", c.dvfe.weights_path},
               {"se_ratio", c.dvfe.se_ratio},
               {"trainable", c.dvfe.trainable},
               {"pretrain_epochs", c.dvfe.pretrain_epochs},
               {"pretrain_batch_size", c.dvfe.pretrain_batch_size},
               {"pretrain_lr", c.dvfe.pretrain_lr}};
  j["tfe"] = {{"reader", c.tfe.reader},
              {"ocr_command", c.tfe.ocr_command},
              {"max_vocab", c.tfe.max_vocab},
              {"upscale_factor", c.tfe.upscale_factor},
              {"max_upscale_pixels", c.tfe.max_upscale_pixels}};
  j["train"] = {{"mask", c.train.mask},
                {"batch_size", c.train.batch_size},
                {"epochs", c.train.epochs},
                {"lr", c.train.lr},
                {"seed", OptionalSeed(c.train.seed)},
                {"class_weights", c.train.class_weights},
                {"weight_decay", c.train.weight_decay},
                {"standardize", c.train.standardize}};
  j["eval"] = {{"match_threshold", c.eval.match_threshold},
               {"unmatched", c.eval.unmatched},
               {"folds", c.eval.folds}};
  return j;
}

template <typename T>
void Get(const json& j, const char* key, T& out) {
  out = j.at(key).get<T>();
}

void GetSeed(const json& j, const char* key, std::optional<std::uint64_t>& out) {
  const auto& v = j.at(key);
  out = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
}

PipelineConfig FromJson(const json& j) {
  PipelineConfig c;
  Get(j, "seed", c.seed);
  Get(j, "cache_dir", c.cache_dir);
  Get(j, "workers", c.workers);
  const auto& co = j.at("corpus");
  Get(co, "path", c.corpus.path);
  Get(co, "train_file", c.corpus.train_file);
  Get(co, "val_file", c.corpus.val_file);
  Get(co, "train_images", c.corpus.train_images);
  Get(co, "val_images", c.corpus.val_images);
  Get(co, "texts_file", c.corpus.texts_file);
  Get(co, "pages", c.corpus.pages);
  Get(co, "page_width", c.corpus.page_width);
  Get(co, "page_height", c.corpus.page_height);
  Get(co, "weights", c.corpus.weights);
  Get(co, "validation_fraction", c.corpus.validation_fraction);
  const auto& lo = j.at("localizer");
  Get(lo, "kind", c.localizer.kind);
  Get(lo, "detections_path", c.localizer.detections_path);
  Get(lo, "score_floor", c.localizer.score_floor);
  Get(lo, "jitter", c.localizer.jitter);
  Get(lo, "drop_rate", c.localizer.drop_rate);
  GetSeed(lo, "seed", c.localizer.seed);
  Get(j.at("svfe"), "normalize", c.svfe.normalize);
  const auto& dv = j.at("dvfe");
  Get(dv, "backbone", c.dvfe.backbone);
  Get(dv, "weights_path", c.dvfe.weights_path);
  Get(dv, "se_ratio", c.dvfe.se_ratio);
  Get(dv, "trainable", c.dvfe.trainable);
  Get(dv, "pretrain_epochs", c.dvfe.pretrain_epochs);
  Get(dv, "pretrain_batch_size", c.dvfe.pretrain_batch_size);
  Get(dv, "pretrain_lr", c.dvfe.pretrain_lr);
  const auto& tf = j.at("tfe");
  Get(tf, "reader", c.tfe.reader);
  Get(tf, "ocr_command", c.tfe.ocr_command);
  Get(tf, "max_vocab", c.tfe.max_vocab);
  Get(tf, "upscale_factor", c.tfe.upscale_factor);
  Get(tf, "max_upscale_pixels", c.tfe.max_upscale_pixels);
  const auto& tr = j.at("train");
  Get(tr, "mask", c.train.mask);
  Get(tr, "batch_size", c.train.batch_size);
  Get(tr, "epochs", c.train.epochs);
  Get(tr, "lr", c.train.lr);
  GetSeed(tr, "seed", c.train.seed);
  Get(tr, "class_weights", c.train.class_weights);
  Get(tr, "weight_decay", c.train.weight_decay);
  Get(tr, "standardize", c.train.standardize);
  const auto& ev = j.at("eval");
  Get(ev, "match_threshold", c.eval.match_threshold);
  Get(ev, "unmatched", c.eval.unmatched);
  Get(ev, "folds", c.eval.folds);
  return c;
}

bool IsSeedKey(const std::string& path) { return path == "localizer.seed" || path == "train.seed"; }

// Checks `value` against the type of `schema` at `path`.
void CheckType(const json& schema, const json& value, const std::string& path) {
  auto bad = [&](const char* want) {
    Fail(ErrorKind::kConfiguration, "config key " + path + " must be " + want + ", got " + value.dump());
  };
  if (IsSeedKey(path)) {
    if (!value.is_null() && !value.is_number_unsigned()) bad("a non-negative integer or null");
    return;
  }
  switch (schema.type()) {
    case json::value_t::boolean:
      if (!value.is_boolean()) bad("a boolean");
      break;
    case json::value_t::string:
      if (!value.is_string()) bad("a string");
      break;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      if (!value.is_number_integer()) bad("an integer");
      if (schema.is_number_unsigned() && value.is_number_integer() && value.get<std::int64_t>() < 0) {
        bad("a non-negative integer");
      }
      break;
    case json::value_t::number_float:
      if (!value.is_number()) bad("a number");
      break;
    case json::value_t::array:
      if (!value.is_array() || value.size() != schema.size()) bad("an array of the default length");
      for (const auto& v : value) {
        if (!v.is_number()) bad("an array of numbers");
      }
      break;
    default:
      bad("a value of the default type");
  }
}

void Merge(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) Fail(ErrorKind::kConfiguration, "config section " + prefix + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) Fail(ErrorKind::kConfiguration, "unknown config key: " + path);
    json& slot = base[it.key()];
    if (slot.is_object()) {
      Merge(slot, it.value(), path);
    } else {
      CheckType(slot, it.value(), path);
      slot = it.value();
    }
  }
}

json NestedPatch(const std::string& path, json value) {
  std::size_t end = path.size();
  while (true) {
    const auto dot = end == 0 ? std::string::npos : path.rfind('.', end - 1);
    const std::size_t begin = dot == std::string::npos ? 0 : dot + 1;
    const std::string key = path.substr(begin, end - begin);
    if (key.empty()) Fail(ErrorKind::kConfiguration, "empty key in override path: " + path);
    value = json{{key, std::move(value)}};
    if (dot == std::string::npos) return value;
    end = dot;
  }
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    Fail(ErrorKind::kConfiguration, "override must look like key.path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json probe = doc;
  try {
    Merge(probe, NestedPatch(path, value), "");
  } catch (const Error&) {
    // String-typed keys take the literal text even when it parses as JSON.
    if (value.is_string()) throw;
    probe = doc;
    Merge(probe, NestedPatch(path, json(raw)), "");
  }
  doc = std::move(probe);
}

PipelineConfig Finish(json doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) ApplyOverride(doc, o);
  PipelineConfig c = FromJson(doc);
  ValidateConfig(c);
  return c;
}

json Normalized(const PipelineConfig& c) {
  json j = ToJson(c);
  j.erase("cache_dir");
  j.erase("workers");
  j["corpus"].erase("path");
  return j;
}

}  // namespace

PipelineConfig ParseConfig(const std::string& json_text, const std::vector<std::string>& overrides) {
  json doc = ToJson(PipelineConfig{});
  if (!json_text.empty()) {
    json user;
    try {
      user = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("config: ") + e.what(), static_cast<std::int64_t>(e.byte));
    }
    Merge(doc, user, "");
  }
  return Finish(std::move(doc), overrides);
}

PipelineConfig LoadConfig(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kConfiguration, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), overrides);
}

PipelineConfig ConfigWithOverrides(const PipelineConfig& base, const std::vector<std::string>& overrides) {
  return Finish(ToJson(base), overrides);
}

std::string ConfigToJson(const PipelineConfig& config) { return ToJson(config).dump(2) + "\n"; }

std::string ConfigFingerprint(const PipelineConfig& config) {
  return HexDigest(HashBytes(Normalized(config).dump()));
}

std::string SectionFingerprint(const PipelineConfig& config, const std::vector<std::string>& sections) {
  const json full = Normalized(config);
  json part = json::object();
  for (const auto& s : sections) {
    if (!full.contains(s)) Fail(ErrorKind::kConfiguration, "unknown config section: " + s);
    part[s] = full.at(s);
  }
  return HexDigest(HashBytes(part.dump()));
}

void ValidateConfig(const PipelineConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) Fail(ErrorKind::kConfiguration, msg);
  };
  need(c.workers >= 0, "workers must be >= 0");
  need(c.corpus.pages > 0, "corpus.pages must be positive");
  need(c.corpus.validation_fraction >= 0.0 && c.corpus.validation_fraction < 1.0,
       "corpus.validation_fraction must lie in [0, 1)");
  const auto& k = c.localizer.kind;
  need(k == "ground_truth" || k == "detection_file" || k == "perturbed",
       "localizer.kind must be ground_truth, detection_file or perturbed");
  need(k != "detection_file" || !c.localizer.detections_path.empty(),
       "localizer.detections_path is required for detection_file");
  need(c.localizer.score_floor >= 0.0 && c.localizer.score_floor <= 1.0, "localizer.score_floor must lie in [0, 1]");
  need(c.localizer.jitter >= 0.0, "localizer.jitter must be >= 0");
  need(c.localizer.drop_rate >= 0.0 && c.localizer.drop_rate < 1.0, "localizer.drop_rate must lie in [0, 1)");
  need(c.dvfe.backbone == "tiny" || c.dvfe.backbone == "reference", "dvfe.backbone must be tiny or reference");
  need(c.dvfe.se_ratio > 0, "dvfe.se_ratio must be positive");
  need(c.dvfe.pretrain_epochs >= 0, "dvfe.pretrain_epochs must be >= 0");
  need(c.dvfe.pretrain_batch_size > 0, "dvfe.pretrain_batch_size must be positive");
  need(c.dvfe.pretrain_lr > 0.0, "dvfe.pretrain_lr must be positive");
  const auto& r = c.tfe.reader;
  need(r == "ground_truth" || r == "external" || r == "null", "tfe.reader must be ground_truth, external or null");
  need(r != "external" || !c.tfe.ocr_command.empty(), "tfe.ocr_command is required for the external reader");
  need(c.tfe.max_vocab > 0, "tfe.max_vocab must be positive");
  need(c.tfe.upscale_factor >= 1, "tfe.upscale_factor must be >= 1");
  need(c.tfe.max_upscale_pixels > 0, "tfe.max_upscale_pixels must be positive");
  const AblationMask mask = AblationMask::Parse(c.train.mask);
  need(mask.any(), "train.mask must enable at least one extractor");
  need(c.train.batch_size > 0, "train.batch_size must be positive");
  need(c.train.epochs > 0, "train.epochs must be positive");
  need(c.train.lr > 0.0 && std::isfinite(c.train.lr), "train.lr must be positive");
  need(c.train.weight_decay >= 0.0, "train.weight_decay must be >= 0");
  need(c.eval.match_threshold > 0.0 && c.eval.match_threshold <= 1.0, "eval.match_threshold must lie in (0, 1]");
  ParseUnmatchedPolicy(c.eval.unmatched);
  need(c.eval.folds >= 2, "eval.folds must be >= 2");
}

std::filesystem::path ResolveCacheDir(const PipelineConfig& config) {
  if (!config.cache_dir.empty()) return config.cache_dir;
  if (const char* env = std::getenv("VTLAYOUT_CACHE_DIR"); env && *env) return env;
  return "vtlayout_cache";
}

std::uint64_t TrainSeed(const PipelineConfig& c) { return c.train.seed.value_or(MixSeed(c.seed, 0x7124)); }
std::uint64_t LocalizerSeed(const PipelineConfig& c) { return c.localizer.seed.value_or(MixSeed(c.seed, 0x10CA)); }
std::uint64_t BackboneSeed(const PipelineConfig& c) { return MixSeed(c.seed, 0xBB0E); }

}  // namespace vtlayout
