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

#include "vtlayout/fusion/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <json.hpp>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"

namespace vtlayout {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;
using CVec = Eigen::Map<const Eigen::VectorXd>;

constexpr int kSchemaVersion = 1;
constexpr const char* kModelKind = "vtlayout_fusion";

void InitUniform(Param& w, int fan_in, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (double& v : w.value) v = rng.Uniform(-a, a);
}

std::string Upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string AblationMask::Label() const {
  std::string out;
  auto add = [&out](const char* part) {
    if (!out.empty()) out += '+';
    out += part;
  };
  if (deep) add("DVFE");
  if (shallow) add("SVFE");
  if (text) add("TFE");
  return out.empty() ? "none" : out;
}

std::string AblationMask::Code() const {
  std::string out;
  auto add = [&out](char part) {
    if (!out.empty()) out += '+';
    out += part;
  };
  if (deep) add('D');
  if (shallow) add('S');
  if (text) add('T');
  return out;
}

AblationMask AblationMask::Parse(const std::string& text) {
  AblationMask m{false, false, false};
  std::string s = Upper(text);
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find('+', start), s.size());
    const std::string part = s.substr(start, end - start);
    if (part == "D" || part == "DVFE") {
      m.deep = true;
    } else if (part == "S" || part == "SVFE") {
      m.shallow = true;
    } else if (part == "T" || part == "TFE") {
      m.text = true;
    } else {
      Fail(ErrorKind::kConfiguration, "unknown extractor '" + part + "' in mask '" + text + "'");
    }
    start = end + 1;
  }
  return m;
}

AblationMask FullMask() { return {true, true, true}; }

Logits Softmax(const Logits& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  Logits p;
  double sum = 0.0;
  for (int k = 0; k < kNumCategories; ++k) {
    p[k] = std::exp(logits[k] - m);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct FusionModel::BatchCache {
  int batch = 0;
  MatR shallow;                                       // B x 256, standardized
  std::vector<const TextFeature*> text;               // per sample
  std::vector<MatR> hidden;                           // post-ReLU per MLP layer
  std::vector<std::vector<double>> deep_scaled;       // per sample
  std::vector<SeBlock::Trace> se_traces;
  std::vector<std::vector<Tensor3>> backbone_traces;  // trainable backbone only
  MatR head_in;
  MatR logits;
};

FusionModel FusionModel::Build(const AblationMask& mask, int deep_channels, int vocab_size, std::uint64_t seed,
                               int se_ratio) {
  if (!mask.any()) Fail(ErrorKind::kConfiguration, "ablation mask selects no extractor");
  if (mask.deep && deep_channels <= 0) Fail(ErrorKind::kConfiguration, "deep channel count must be positive");
  if (mask.text && vocab_size <= 0) Fail(ErrorKind::kConfiguration, "vocabulary size must be positive");
  FusionModel m;
  m.mask_ = mask;
  m.deep_channels_ = mask.deep ? deep_channels : 0;
  m.vocab_size_ = mask.text ? vocab_size : 0;
  m.se_ratio_ = se_ratio;
  Rng rng(MixSeed(seed, 0xF05E));
  int in = m.mlp_input_width();
  if (in > 0) {
    for (std::size_t l = 0; l < kMlpWidths.size(); ++l) {
      const int out = kMlpWidths[l];
      Param w("mlp" + std::to_string(l) + ".weight", {in, out});
      InitUniform(w, in, rng);
      m.mlp_w_.push_back(std::move(w));
      m.mlp_b_.emplace_back("mlp" + std::to_string(l) + ".bias", std::vector<std::int64_t>{out});
      in = out;
    }
  }
  if (mask.deep) {
    m.se_.emplace(deep_channels, se_ratio);
    m.se_->Initialize(rng);
  }
  const int head_in = m.head_input_width();
  m.head_w_ = Param("head.weight", {head_in, kNumCategories});
  InitUniform(m.head_w_, head_in, rng);
  m.head_b_ = Param("head.bias", {kNumCategories});
  return m;
}

FusionModel::FusionModel(const FusionModel& o)
    : mask_(o.mask_), deep_channels_(o.deep_channels_), vocab_size_(o.vocab_size_), se_ratio_(o.se_ratio_),
      mlp_w_(o.mlp_w_), mlp_b_(o.mlp_b_), head_w_(o.head_w_), head_b_(o.head_b_), se_(o.se_),
      shallow_std_(o.shallow_std_), deep_std_(o.deep_std_),
      backbone_(o.backbone_ ? std::make_unique<Backbone>(*o.backbone_) : nullptr), fingerprints_(o.fingerprints_) {}

FusionModel& FusionModel::operator=(const FusionModel& o) {
  if (this != &o) {
    FusionModel copy(o);
    *this = std::move(copy);
  }
  return *this;
}

int FusionModel::mlp_input_width() const {
  return (mask_.shallow ? kHistogramBins : 0) + (mask_.text ? vocab_size_ : 0);
}

int FusionModel::head_input_width() const {
  return (has_mlp() ? kMlpWidths.back() : 0) + (mask_.deep ? deep_channels_ : 0);
}

void FusionModel::SetShallowStandardizer(Standardizer s) {
  if (!s.empty() && (s.scale.size() != kHistogramBins || s.shift.size() != kHistogramBins)) {
    Fail(ErrorKind::kShape, "shallow standardizer must have 256 entries");
  }
  shallow_std_ = std::move(s);
}

void FusionModel::SetDeepStandardizer(Standardizer s) {
  if (!s.empty() && (static_cast<int>(s.scale.size()) != deep_channels_ ||
                     static_cast<int>(s.shift.size()) != deep_channels_)) {
    Fail(ErrorKind::kShape, "deep standardizer width differs from the channel count");
  }
  deep_std_ = std::move(s);
}

void FusionModel::AttachTrainableBackbone(std::unique_ptr<Backbone> backbone) {
  if (!mask_.deep) Fail(ErrorKind::kConfiguration, "a trainable backbone needs the deep extractor in the mask");
  if (backbone->channels() != deep_channels_) Fail(ErrorKind::kShape, "backbone channels differ from the model");
  backbone_ = std::move(backbone);
}

std::vector<Param*> FusionModel::params() {
  std::vector<Param*> out;
  for (std::size_t l = 0; l < mlp_w_.size(); ++l) {
    out.push_back(&mlp_w_[l]);
    out.push_back(&mlp_b_[l]);
  }
  if (se_) {
    for (Param* p : se_->params()) out.push_back(p);
  }
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  if (backbone_) {
    for (Param* p : backbone_->params()) out.push_back(p);
  }
  return out;
}

void FusionModel::ZeroGrad() {
  for (Param* p : params()) p->ZeroGrad();
}

void FusionModel::ValidateBundle(const FeatureBundle& b) const {
  if (mask_.deep) {
    if (backbone_) {
      if (!b.image) Fail(ErrorKind::kInput, "bundle lacks the block image needed by the trainable DVFE branch");
    } else {
      if (!b.deep) Fail(ErrorKind::kInput, "bundle lacks the DVFE feature");
      if (static_cast<int>(b.deep->size()) != deep_channels_) {
        Fail(ErrorKind::kShape, "DVFE feature has length " + std::to_string(b.deep->size()) + ", model expects " +
                                    std::to_string(deep_channels_));
      }
    }
  }
  if (mask_.shallow) {
    if (!b.shallow) Fail(ErrorKind::kInput, "bundle lacks the SVFE feature");
    if (b.shallow->size() != kHistogramBins) Fail(ErrorKind::kShape, "SVFE feature must have length 256");
  }
  if (mask_.text) {
    if (!b.text) Fail(ErrorKind::kInput, "bundle lacks the TFE feature");
    if (b.text->dim != vocab_size_) {
      Fail(ErrorKind::kShape, "TFE feature has length " + std::to_string(b.text->dim) + ", model expects " +
                                  std::to_string(vocab_size_));
    }
  }
}

void FusionModel::ForwardBatch(std::span<const FeatureBundle* const> batch, BatchCache& cache) const {
  const int n = static_cast<int>(batch.size());
  cache.batch = n;
  for (const FeatureBundle* b : batch) ValidateBundle(*b);

  const int head_in = head_input_width();
  cache.head_in = MatR::Zero(n, head_in);
  const int deep_offset = has_mlp() ? kMlpWidths.back() : 0;

  if (has_mlp()) {
    const int out0 = kMlpWidths[0];
    MatR a = MatR::Zero(n, out0);
    if (mask_.shallow) {
      cache.shallow.resize(n, kHistogramBins);
      for (int i = 0; i < n; ++i) {
        const auto& s = *batch[i]->shallow;
        for (int k = 0; k < kHistogramBins; ++k) {
          cache.shallow(i, k) = shallow_std_.empty() ? s[k] : (s[k] - shallow_std_.shift[k]) * shallow_std_.scale[k];
        }
      }
      a.noalias() += cache.shallow * CMapR(mlp_w_[0].value.data(), mlp_input_width(), out0).topRows(kHistogramBins);
    }
    if (mask_.text) {
      const int offset = mask_.shallow ? kHistogramBins : 0;
      cache.text.assign(static_cast<std::size_t>(n), nullptr);
      for (int i = 0; i < n; ++i) {
        cache.text[i] = &*batch[i]->text;
        for (const auto& [j, v] : batch[i]->text->entries) {
          const double* row = mlp_w_[0].value.data() + static_cast<std::size_t>(offset + j) * out0;
          for (int o = 0; o < out0; ++o) a(i, o) += v * row[o];
        }
      }
    }
    cache.hidden.clear();
    int in = out0;
    for (std::size_t l = 0; l < mlp_w_.size(); ++l) {
      if (l > 0) {
        const int out = kMlpWidths[l];
        a.noalias() = cache.hidden.back() * CMapR(mlp_w_[l].value.data(), in, out);
        in = out;
      }
      a.rowwise() += CVec(mlp_b_[l].value.data(), a.cols()).transpose();
      cache.hidden.push_back(a.cwiseMax(0.0));
    }
    cache.head_in.leftCols(kMlpWidths.back()) = cache.hidden.back();
  }

  if (mask_.deep) {
    cache.deep_scaled.assign(static_cast<std::size_t>(n), {});
    cache.se_traces.assign(static_cast<std::size_t>(n), {});
    cache.backbone_traces.assign(backbone_ ? static_cast<std::size_t>(n) : 0, {});
    for (int i = 0; i < n; ++i) {
      std::vector<double> z;
      if (backbone_) {
        cache.backbone_traces[i] = backbone_->ForwardTrace(*batch[i]->image);
        z = GlobalAveragePool(cache.backbone_traces[i].back());
      } else {
        z = *batch[i]->deep;
      }
      if (!deep_std_.empty()) {
        for (int c = 0; c < deep_channels_; ++c) z[c] = (z[c] - deep_std_.shift[c]) * deep_std_.scale[c];
      }
      const std::vector<double> gated = se_->GatePooled(z, &cache.se_traces[i]);
      for (int c = 0; c < deep_channels_; ++c) cache.head_in(i, deep_offset + c) = gated[c];
      cache.deep_scaled[i] = std::move(z);
    }
  }

  cache.logits = cache.head_in * CMapR(head_w_.value.data(), head_in, kNumCategories);
  cache.logits.rowwise() += CVec(head_b_.value.data(), kNumCategories).transpose();
}

Logits FusionModel::ComputeLogits(const FeatureBundle& bundle) const {
  const FeatureBundle* ptr = &bundle;
  BatchCache cache;
  ForwardBatch(std::span<const FeatureBundle* const>(&ptr, 1), cache);
  Logits out;
  for (int k = 0; k < kNumCategories; ++k) out[k] = cache.logits(0, k);
  return out;
}

Prediction FusionModel::Predict(const FeatureBundle& bundle) const {
  Prediction p;
  p.probabilities = Softmax(ComputeLogits(bundle));
  p.category = static_cast<Category>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
  return p;
}

std::vector<Prediction> FusionModel::PredictAll(std::span<const FeatureBundle> bundles) const {
  std::vector<Prediction> out;
  out.reserve(bundles.size());
  for (const auto& b : bundles) out.push_back(Predict(b));
  return out;
}

double FusionModel::Loss(std::span<const FeatureBundle* const> batch,
                         const std::array<double, kNumCategories>* class_weights, bool accumulate) {
  if (batch.empty()) Fail(ErrorKind::kData, "loss over an empty batch");
  for (const FeatureBundle* b : batch) {
    if (!b->label) Fail(ErrorKind::kData, "training bundle for block " + std::to_string(b->block_id) + " is unlabeled");
  }
  BatchCache cache;
  ForwardBatch(batch, cache);
  const int n = cache.batch;
  MatR grad_logits(n, kNumCategories);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    Logits l;
    for (int k = 0; k < kNumCategories; ++k) l[k] = cache.logits(i, k);
    const Logits p = Softmax(l);
    const int y = CategoryCode(*batch[i]->label);
    const double w = class_weights ? (*class_weights)[y] : 1.0;
    const double m = *std::max_element(l.begin(), l.end());
    double lse = 0.0;
    for (double v : l) lse += std::exp(v - m);
    loss += w * (m + std::log(lse) - l[y]);
    for (int k = 0; k < kNumCategories; ++k) grad_logits(i, k) = w * (p[k] - (k == y ? 1.0 : 0.0)) / n;
  }
  loss /= n;
  if (!accumulate) return loss;

  const int head_in = head_input_width();
  MapR(head_w_.grad.data(), head_in, kNumCategories).noalias() += cache.head_in.transpose() * grad_logits;
  Eigen::Map<Eigen::VectorXd>(head_b_.grad.data(), kNumCategories) += grad_logits.colwise().sum().transpose();
  const MatR grad_head_in = grad_logits * CMapR(head_w_.value.data(), head_in, kNumCategories).transpose();

  if (has_mlp()) {
    MatR grad_h = grad_head_in.leftCols(kMlpWidths.back());
    for (std::size_t l = mlp_w_.size(); l-- > 0;) {
      const MatR grad_a = grad_h.cwiseProduct((cache.hidden[l].array() > 0.0).cast<double>().matrix());
      Eigen::Map<Eigen::VectorXd>(mlp_b_[l].grad.data(), grad_a.cols()) += grad_a.colwise().sum().transpose();
      const int out = static_cast<int>(grad_a.cols());
      if (l > 0) {
        const int in = kMlpWidths[l - 1];
        MapR(mlp_w_[l].grad.data(), in, out).noalias() += cache.hidden[l - 1].transpose() * grad_a;
        grad_h = grad_a * CMapR(mlp_w_[l].value.data(), in, out).transpose();
      } else {
        if (mask_.shallow) {
          MapR(mlp_w_[0].grad.data(), mlp_input_width(), out).topRows(kHistogramBins).noalias() +=
              cache.shallow.transpose() * grad_a;
        }
        if (mask_.text) {
          const int offset = mask_.shallow ? kHistogramBins : 0;
          for (int i = 0; i < n; ++i) {
            for (const auto& [j, v] : cache.text[i]->entries) {
              double* row = mlp_w_[0].grad.data() + static_cast<std::size_t>(offset + j) * out;
              for (int o = 0; o < out; ++o) row[o] += v * grad_a(i, o);
            }
          }
        }
      }
    }
  }

  if (mask_.deep) {
    const int deep_offset = has_mlp() ? kMlpWidths.back() : 0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> g(static_cast<std::size_t>(deep_channels_));
      for (int c = 0; c < deep_channels_; ++c) g[c] = grad_head_in(i, deep_offset + c);
      std::vector<double> grad_z = se_->GatePooledBackward(cache.deep_scaled[i], cache.se_traces[i], g);
      if (backbone_) {
        if (!deep_std_.empty()) {
          for (int c = 0; c < deep_channels_; ++c) grad_z[c] *= deep_std_.scale[c];
        }
        const Tensor3& map = cache.backbone_traces[i].back();
        backbone_->Backward(cache.backbone_traces[i], GlobalAveragePoolBackward(map.h, map.w, grad_z));
      }
    }
  }
  return loss;
}

std::uint64_t FusionModel::ActivationSignature(std::span<const FeatureBundle* const> batch) const {
  BatchCache cache;
  ForwardBatch(batch, cache);
  Fnv1a h;
  for (const auto& m : cache.hidden) {
    for (Eigen::Index i = 0; i < m.size(); ++i) h.UpdateU64(m.data()[i] > 0.0 ? 1 : 0);
  }
  for (const auto& t : cache.se_traces) {
    for (double v : t.pre_hidden) h.UpdateU64(v > 0.0 ? 1 : 0);
  }
  return h.digest();
}

std::vector<double> FusionModel::RawDeep(const FeatureBundle& bundle) const {
  if (backbone_) {
    if (!bundle.image) Fail(ErrorKind::kInput, "bundle lacks the block image needed by the trainable DVFE branch");
    return GlobalAveragePool(backbone_->Forward(*bundle.image));
  }
  if (!bundle.deep) Fail(ErrorKind::kInput, "bundle lacks the DVFE feature");
  return *bundle.deep;
}

TensorBundle FusionModel::ToTensors() const {
  nlohmann::json widths = nlohmann::json::array();
  for (int w : kMlpWidths) widths.push_back(w);
  nlohmann::json manifest = {{"kind", kModelKind},
                             {"schema_version", kSchemaVersion},
                             {"mask", mask_.Label()},
                             {"deep_channels", deep_channels_},
                             {"vocab_size", vocab_size_},
                             {"shallow_width", mask_.shallow ? kHistogramBins : 0},
                             {"mlp_input_width", mlp_input_width()},
                             {"mlp_widths", has_mlp() ? widths : nlohmann::json::array()},
                             {"head_input_width", head_input_width()},
                             {"se_ratio", se_ratio_},
                             {"backbone", backbone_ ? backbone_->architecture() : ""},
                             {"fingerprints", fingerprints_}};
  TensorBundle bundle;
  bundle.manifest = manifest.dump();
  auto add = [&bundle](const std::string& name, const std::vector<std::int64_t>& shape,
                       const std::vector<double>& data) {
    bundle.tensors.push_back({name, shape, data, TensorDtype::kFloat64});
  };
  for (std::size_t l = 0; l < mlp_w_.size(); ++l) {
    add(mlp_w_[l].name, mlp_w_[l].shape, mlp_w_[l].value);
    add(mlp_b_[l].name, mlp_b_[l].shape, mlp_b_[l].value);
  }
  if (se_) {
    for (const Param* p : {&se_->w1(), &se_->b1(), &se_->w2(), &se_->b2()}) add(p->name, p->shape, p->value);
  }
  add(head_w_.name, head_w_.shape, head_w_.value);
  add(head_b_.name, head_b_.shape, head_b_.value);
  auto add_std = [&](const std::string& prefix, const Standardizer& s) {
    if (s.empty()) return;
    const auto n = static_cast<std::int64_t>(s.scale.size());
    add(prefix + ".shift", {n}, s.shift);
    add(prefix + ".scale", {n}, s.scale);
  };
  add_std("standardize.shallow", shallow_std_);
  add_std("standardize.deep", deep_std_);
  if (backbone_) {
    for (Param* p : backbone_->params()) add("backbone." + p->name, p->shape, p->value);
  }
  return bundle;
}

void FusionModel::Save(const std::filesystem::path& path) const { WriteTensorFile(path, ToTensors()); }

FusionModel FusionModel::FromTensors(const TensorBundle& bundle, const ModelExpectations& expect) {
  const auto manifest = nlohmann::json::parse(bundle.manifest, nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) Fail(ErrorKind::kIntegrity, "model manifest is not JSON");
  if (manifest.value("kind", std::string()) != kModelKind) {
    Fail(ErrorKind::kCompatibility, "file is not a fusion model");
  }
  if (manifest.value("schema_version", -1) != kSchemaVersion) {
    Fail(ErrorKind::kCompatibility, "unsupported model schema version " +
                                        std::to_string(manifest.value("schema_version", -1)));
  }
  const AblationMask mask = AblationMask::Parse(manifest.value("mask", std::string()));
  const int c = manifest.value("deep_channels", 0);
  const int v = manifest.value("vocab_size", 0);
  if (expect.mask && *expect.mask != mask) {
    Fail(ErrorKind::kCompatibility, "model mask " + mask.Label() + " differs from expected " + expect.mask->Label());
  }
  if (expect.deep_channels && mask.deep && *expect.deep_channels != c) {
    Fail(ErrorKind::kCompatibility, "model deep width " + std::to_string(c) + " differs from expected " +
                                        std::to_string(*expect.deep_channels));
  }
  if (expect.vocab_size && mask.text && *expect.vocab_size != v) {
    Fail(ErrorKind::kCompatibility, "model vocabulary width " + std::to_string(v) + " differs from expected " +
                                        std::to_string(*expect.vocab_size));
  }
  FusionModel m = Build(mask, c, v, 0, manifest.value("se_ratio", kDefaultSeRatio));
  if (manifest.value("mlp_input_width", -1) != m.mlp_input_width() ||
      manifest.value("head_input_width", -1) != m.head_input_width()) {
    Fail(ErrorKind::kCompatibility, "model width manifest is inconsistent with its mask");
  }
  if (manifest.contains("mlp_widths") && m.has_mlp()) {
    std::vector<int> widths = manifest["mlp_widths"].get<std::vector<int>>();
    if (widths != std::vector<int>(kMlpWidths.begin(), kMlpWidths.end())) {
      Fail(ErrorKind::kCompatibility, "model MLP widths differ from 512/256/128/64");
    }
  }
  const std::string arch = manifest.value("backbone", std::string());
  if (!arch.empty()) m.AttachTrainableBackbone(BuildBackbone(arch));
  std::size_t used = 0;
  auto load = [&](Param& p, const std::string& name) {
    const NamedTensor* t = bundle.Find(name);
    if (t == nullptr) Fail(ErrorKind::kCompatibility, "model file lacks tensor " + name);
    if (t->shape != p.shape) Fail(ErrorKind::kCompatibility, "model tensor " + name + " has the wrong shape");
    p.value = t->data;
    ++used;
  };
  for (std::size_t l = 0; l < m.mlp_w_.size(); ++l) {
    load(m.mlp_w_[l], m.mlp_w_[l].name);
    load(m.mlp_b_[l], m.mlp_b_[l].name);
  }
  if (m.se_) {
    for (Param* p : m.se_->params()) load(*p, p->name);
  }
  load(m.head_w_, m.head_w_.name);
  load(m.head_b_, m.head_b_.name);
  auto load_std = [&](const std::string& prefix, int width) -> Standardizer {
    const NamedTensor* shift = bundle.Find(prefix + ".shift");
    const NamedTensor* scale = bundle.Find(prefix + ".scale");
    if (shift == nullptr && scale == nullptr) return {};
    if (shift == nullptr || scale == nullptr || static_cast<int>(shift->data.size()) != width ||
        static_cast<int>(scale->data.size()) != width) {
      Fail(ErrorKind::kCompatibility, "model standardizer " + prefix + " is malformed");
    }
    used += 2;
    return {shift->data, scale->data};
  };
  if (mask.shallow) m.shallow_std_ = load_std("standardize.shallow", kHistogramBins);
  if (mask.deep) m.deep_std_ = load_std("standardize.deep", c);
  if (m.backbone_) {
    for (Param* p : m.backbone_->params()) load(*p, "backbone." + p->name);
  }
  if (used != bundle.tensors.size()) Fail(ErrorKind::kCompatibility, "model file has unexpected tensors");
  if (manifest.contains("fingerprints") && manifest["fingerprints"].is_object()) {
    m.fingerprints_ = manifest["fingerprints"].get<std::map<std::string, std::string>>();
  }
  return m;
}

FusionModel FusionModel::Load(const std::filesystem::path& path, const ModelExpectations& expect) {
  return FromTensors(ReadTensorFile(path), expect);
}

}  // namespace vtlayout
