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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vtlayout/corpus/category.hpp"
#include "vtlayout/dvfe/backbone.hpp"
#include "vtlayout/dvfe/layers.hpp"
#include "vtlayout/dvfe/se_block.hpp"
#include "vtlayout/svfe/shallow.hpp"
#include "vtlayout/tfe/tfidf.hpp"

namespace vtlayout {

struct AblationMask {
  bool deep = true;
  bool shallow = true;
  bool text = true;

  bool any() const { return deep || shallow || text; }
  // "DVFE+SVFE+TFE" style label.
  std::string Label() const;
  // Short form, e.g. "D+S+T".
  std::string Code() const;
  // Accepts either form, case-insensitive.
  static AblationMask Parse(const std::string& text);
  bool operator==(const AblationMask&) const = default;
};

AblationMask FullMask();

struct FeatureBundle {
  std::optional<std::vector<double>> deep;     // pooled backbone vector, length C
  std::optional<std::vector<double>> shallow;  // length 256
  std::optional<TextFeature> text;             // length V
  std::optional<Tensor3> image;                // only for a trainable backbone
  std::optional<Category> label;
  std::int64_t block_id = -1;
};

struct Prediction {
  Category category = Category::kText;
  std::array<double, kNumCategories> probabilities{};
};

using Logits = std::array<double, kNumCategories>;

Logits Softmax(const Logits& logits);

inline constexpr std::array<int, 4> kMlpWidths = {512, 256, 128, 64};

// Per-feature affine map x -> (x - shift) * scale.
struct Standardizer {
  std::vector<double> shift;
  std::vector<double> scale;

  bool empty() const { return scale.empty(); }
};

struct ModelExpectations {
  std::optional<AblationMask> mask;
  std::optional<int> deep_channels;
  std::optional<int> vocab_size;
};

class FusionModel {
 public:
  // Throws kConfiguration for an empty mask or non-positive widths.
  static FusionModel Build(const AblationMask& mask, int deep_channels, int vocab_size, std::uint64_t seed,
                           int se_ratio = kDefaultSeRatio);

  FusionModel(const FusionModel& other);
  FusionModel& operator=(const FusionModel& other);
  FusionModel(FusionModel&&) = default;
  FusionModel& operator=(FusionModel&&) = default;

  const AblationMask& mask() const { return mask_; }
  int deep_channels() const { return deep_channels_; }
  int vocab_size() const { return vocab_size_; }
  int se_ratio() const { return se_ratio_; }
  int mlp_input_width() const;
  int head_input_width() const;
  bool has_mlp() const { return mlp_input_width() > 0; }
  bool has_se() const { return se_.has_value(); }

  Prediction Predict(const FeatureBundle& bundle) const;
  Logits ComputeLogits(const FeatureBundle& bundle) const;
  std::vector<Prediction> PredictAll(std::span<const FeatureBundle> bundles) const;

  // Mean (optionally class-weighted) cross-entropy over `batch`; when
  // `accumulate` is set, adds its gradient to every parameter's grad.
  double Loss(std::span<const FeatureBundle* const> batch, const std::array<double, kNumCategories>* class_weights,
              bool accumulate);

  std::vector<Param*> params();
  void ZeroGrad();

  // Hash of which rectifiers are active on `batch`; changes when a
  // perturbation crosses a non-differentiable point.
  std::uint64_t ActivationSignature(std::span<const FeatureBundle* const> batch) const;
  // Pooled deep vector as the model sees it before standardization.
  std::vector<double> RawDeep(const FeatureBundle& bundle) const;

  SeBlock* se() { return se_ ? &*se_ : nullptr; }
  Param& mlp_weight(int layer) { return mlp_w_[static_cast<std::size_t>(layer)]; }
  Param& mlp_bias(int layer) { return mlp_b_[static_cast<std::size_t>(layer)]; }
  Param& head_weight() { return head_w_; }
  Param& head_bias() { return head_b_; }

  void SetShallowStandardizer(Standardizer s);
  void SetDeepStandardizer(Standardizer s);
  const Standardizer& shallow_standardizer() const { return shallow_std_; }
  const Standardizer& deep_standardizer() const { return deep_std_; }

  // Makes the backbone part of the model; bundles must then carry images.
  void AttachTrainableBackbone(std::unique_ptr<Backbone> backbone);
  Backbone* backbone() { return backbone_.get(); }
  bool trainable_backbone() const { return backbone_ != nullptr; }

  std::map<std::string, std::string>& fingerprints() { return fingerprints_; }
  const std::map<std::string, std::string>& fingerprints() const { return fingerprints_; }

  void Save(const std::filesystem::path& path) const;
  TensorBundle ToTensors() const;
  // Throws kCompatibility on schema or width mismatch, kIntegrity on damage.
  static FusionModel Load(const std::filesystem::path& path, const ModelExpectations& expect = {});
  static FusionModel FromTensors(const TensorBundle& bundle, const ModelExpectations& expect = {});

 private:
  FusionModel() = default;

  struct BatchCache;
  void ValidateBundle(const FeatureBundle& b) const;
  void ForwardBatch(std::span<const FeatureBundle* const> batch, BatchCache& cache) const;

  AblationMask mask_;
  int deep_channels_ = 0;
  int vocab_size_ = 0;
  int se_ratio_ = kDefaultSeRatio;
  std::vector<Param> mlp_w_;  // [in, out]
  std::vector<Param> mlp_b_;
  Param head_w_;  // [head_in, 5]
  Param head_b_;
  std::optional<SeBlock> se_;
  Standardizer shallow_std_;
  Standardizer deep_std_;
  std::unique_ptr<Backbone> backbone_;
  std::map<std::string, std::string> fingerprints_;
};

}  // namespace vtlayout
