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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/dvfe/tensor_file.hpp"
#include "vtlayout/fusion/model.hpp"
#include "vtlayout/fusion/train.hpp"

namespace vtlayout {
namespace {

namespace fs = std::filesystem;

constexpr int kC = 16;
constexpr int kV = 12;

const std::vector<AblationMask> kAllMasks = {
    {true, true, true}, {true, true, false}, {true, false, true}, {false, true, true},
    {true, false, false}, {false, false, true}, {false, true, false}};

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInput;
}

// Features whose class is visible in every branch.
FeatureBundle MakeBundle(Rng& rng, int cls, double noise = 0.3) {
  FeatureBundle b;
  b.label = static_cast<Category>(cls);
  b.deep.emplace(kC);
  for (int c = 0; c < kC; ++c) (*b.deep)[c] = std::abs((c % kNumCategories == cls ? 1.0 : 0.2) + noise * rng.Normal());
  b.shallow.emplace(kHistogramBins, 0.0);
  double total = 0;
  for (int k = 0; k < kHistogramBins; ++k) {
    const double v = (k / 51 == cls ? 2.0 : 0.5) + noise * rng.Uniform();
    (*b.shallow)[k] = v;
    total += v;
  }
  for (double& v : *b.shallow) v /= total;
  TextFeature t;
  t.dim = kV;
  t.entries.push_back({cls, 0.8});
  t.entries.push_back({kNumCategories + rng.UniformInt(0, kV - kNumCategories - 1), 0.6});
  std::sort(t.entries.begin(), t.entries.end());
  b.text = t;
  return b;
}

std::vector<FeatureBundle> MakeData(Rng& rng, int per_class, double noise = 0.3) {
  std::vector<FeatureBundle> out;
  for (int i = 0; i < per_class; ++i)
    for (int c = 0; c < kNumCategories; ++c) out.push_back(MakeBundle(rng, c, noise));
  return out;
}

TEST(Mask, LabelsCodesAndParsing) {
  EXPECT_EQ(FullMask().Label(), "DVFE+SVFE+TFE");
  EXPECT_EQ(FullMask().Code(), "D+S+T");
  EXPECT_EQ(AblationMask::Parse("svfe+tfe"), (AblationMask{false, true, true}));
  EXPECT_EQ(AblationMask::Parse("D"), (AblationMask{true, false, false}));
  EXPECT_EQ(KindOf([] { AblationMask::Parse("D+X"); }), ErrorKind::kConfiguration);
  for (const auto& m : kAllMasks) {
    EXPECT_EQ(AblationMask::Parse(m.Label()), m);
    EXPECT_EQ(AblationMask::Parse(m.Code()), m);
  }
}

TEST(Model, InputWidthsFollowTheMask) {
  const auto full = FusionModel::Build(FullMask(), 1280, 4096, 1);
  EXPECT_EQ(full.mlp_input_width(), 4352);
  EXPECT_EQ(full.head_input_width(), 1344);
  EXPECT_TRUE(full.has_se());
  const auto s = FusionModel::Build({false, true, false}, 1280, 4096, 1);
  EXPECT_EQ(s.mlp_input_width(), 256);
  EXPECT_EQ(s.head_input_width(), 64);
  EXPECT_FALSE(s.has_se());
  const auto d = FusionModel::Build({true, false, false}, 1280, 4096, 1);
  EXPECT_FALSE(d.has_mlp());
  EXPECT_EQ(d.head_input_width(), 1280);
  EXPECT_EQ(KindOf([] { FusionModel::Build({false, false, false}, 8, 8, 1); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { FusionModel::Build({false, false, true}, 8, 0, 1); }), ErrorKind::kConfiguration);
}

TEST(Model, SameSeedSameWeights) {
  auto a = FusionModel::Build(FullMask(), kC, kV, 7, 4);
  auto b = FusionModel::Build(FullMask(), kC, kV, 7, 4);
  auto c = FusionModel::Build(FullMask(), kC, kV, 8, 4);
  const auto pa = a.params(), pb = b.params(), pc = c.params();
  ASSERT_EQ(pa.size(), pb.size());
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->value, pb[i]->value);
    differs |= pa[i]->value != pc[i]->value;
  }
  EXPECT_TRUE(differs);
}

TEST(Softmax, SumsToOneAndIgnoresShifts) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    Logits l;
    for (double& v : l) v = rng.Uniform(-50, 50);
    const auto p = Softmax(l);
    double s = 0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    Logits shifted = l;
    for (double& v : shifted) v += 700.0;
    const auto q = Softmax(shifted);
    for (int k = 0; k < kNumCategories; ++k) EXPECT_NEAR(p[k], q[k], 1e-12);
  }
}

// Independent forward pass written with plain loops.
Logits ReferenceLogits(FusionModel& m, const FeatureBundle& b) {
  std::vector<double> x;
  for (double v : *b.shallow) x.push_back(v);
  const auto dense = b.text->Dense();
  x.insert(x.end(), dense.begin(), dense.end());
  int in = static_cast<int>(x.size());
  for (int l = 0; l < 4; ++l) {
    const int out = kMlpWidths[l];
    std::vector<double> y(out);
    for (int o = 0; o < out; ++o) {
      double a = m.mlp_bias(l).value[o];
      for (int i = 0; i < in; ++i) a += x[i] * m.mlp_weight(l).value[static_cast<std::size_t>(i) * out + o];
      y[o] = std::max(a, 0.0);
    }
    x = y;
    in = out;
  }
  const auto& z = *b.deep;
  SeBlock& se = *m.se();
  const int h = kC / se.ratio();
  std::vector<double> hidden(h);
  for (int j = 0; j < h; ++j) {
    double a = se.b1().value[j];
    for (int c = 0; c < kC; ++c) a += se.w1().value[j * kC + c] * z[c];
    hidden[j] = std::max(a, 0.0);
  }
  for (int c = 0; c < kC; ++c) {
    double a = se.b2().value[c];
    for (int j = 0; j < h; ++j) a += se.w2().value[c * h + j] * hidden[j];
    x.push_back(z[c] / (1.0 + std::exp(-a)));
  }
  Logits out;
  for (int k = 0; k < kNumCategories; ++k) {
    double a = m.head_bias().value[k];
    for (std::size_t i = 0; i < x.size(); ++i) a += x[i] * m.head_weight().value[i * kNumCategories + k];
    out[k] = a;
  }
  return out;
}

TEST(Model, ForwardMatchesPlainLoops) {
  Rng rng(2);
  auto m = FusionModel::Build(FullMask(), kC, kV, 3, 4);
  for (Param* p : m.params())
    for (double& v : p->value) v += 0.05 * rng.Normal();
  for (int t = 0; t < 10; ++t) {
    const auto b = MakeBundle(rng, t % kNumCategories);
    const Logits got = m.ComputeLogits(b), want = ReferenceLogits(m, b);
    for (int k = 0; k < kNumCategories; ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
    const auto p = m.Predict(b);
    EXPECT_EQ(CategoryCode(p.category),
              std::max_element(want.begin(), want.end()) - want.begin());
  }
}

TEST(Model, ZeroParametersGiveUniformPrediction) {
  Rng rng(3);
  auto m = FusionModel::Build(FullMask(), kC, kV, 3, 4);
  for (Param* p : m.params()) std::fill(p->value.begin(), p->value.end(), 0.0);
  const auto data = MakeData(rng, 2);
  std::vector<const FeatureBundle*> ptrs;
  for (const auto& b : data) ptrs.push_back(&b);
  EXPECT_NEAR(m.Loss(ptrs, nullptr, false), std::log(5.0), 1e-12);
  for (double p : m.Predict(data[0]).probabilities) EXPECT_NEAR(p, 0.2, 1e-15);
}

TEST(Train, MemorizesASingleSample) {
  Rng rng(4);
  std::vector<FeatureBundle> one = {MakeBundle(rng, 2)};
  auto m = FusionModel::Build(FullMask(), kC, kV, 5, 4);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  const auto r = Train(m, one, cfg);
  EXPECT_LT(r.epoch_loss.back(), 0.01);
  EXPECT_EQ(m.Predict(one[0]).category, Category::kList);
}

TEST(Train, SeparableDataReachesPerfectAccuracyForEveryMask) {
  Rng rng(5);
  const auto train = MakeData(rng, 20, 0.1);
  const auto test = MakeData(rng, 10, 0.1);
  for (const auto& mask : kAllMasks) {
    auto m = FusionModel::Build(mask, kC, kV, 6, 4);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.batch_size = 16;
    cfg.learning_rate = 5e-3;
    Train(m, train, cfg);
    int correct = 0;
    for (const auto& b : test) correct += m.Predict(b).category == *b.label;
    EXPECT_EQ(correct, static_cast<int>(test.size())) << mask.Label();
  }
}

TEST(Train, FullBatchLossDecreasesAtFirst) {
  Rng rng(6);
  const auto data = MakeData(rng, 8, 0.5);
  auto m = FusionModel::Build(FullMask(), kC, kV, 7, 4);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = static_cast<int>(data.size());
  cfg.learning_rate = 1e-4;
  std::vector<double> seen;
  const auto r = Train(m, data, cfg, [&](int, double loss) { seen.push_back(loss); });
  ASSERT_EQ(r.epoch_loss.size(), 5u);
  EXPECT_EQ(seen, r.epoch_loss);
  for (int e = 1; e < 5; ++e) EXPECT_LT(r.epoch_loss[e], r.epoch_loss[e - 1]);
}

TEST(Train, IsDeterministic) {
  Rng rng(7);
  const auto data = MakeData(rng, 6);
  auto a = FusionModel::Build(FullMask(), kC, kV, 8, 4);
  auto b = FusionModel::Build(FullMask(), kC, kV, 8, 4);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 7;
  cfg.seed = 11;
  EXPECT_EQ(Train(a, data, cfg).epoch_loss, Train(b, data, cfg).epoch_loss);
  EXPECT_EQ(a.ToTensors().tensors.size(), b.ToTensors().tensors.size());
  EXPECT_EQ(SerializeTensors(a.ToTensors()), SerializeTensors(b.ToTensors()));
}

TEST(Train, ErrorPaths) {
  Rng rng(8);
  auto data = MakeData(rng, 2);
  auto m = FusionModel::Build(FullMask(), kC, kV, 9, 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  data[3].label.reset();
  EXPECT_EQ(KindOf([&] { Train(m, data, cfg); }), ErrorKind::kData);
  EXPECT_EQ(KindOf([&] { Train(m, std::span<const FeatureBundle>(), cfg); }), ErrorKind::kData);
  cfg.batch_size = 0;
  EXPECT_EQ(KindOf([&] { ValidateTrainConfig(cfg); }), ErrorKind::kConfiguration);
  cfg = {};
  cfg.learning_rate = -1;
  EXPECT_EQ(KindOf([&] { ValidateTrainConfig(cfg); }), ErrorKind::kConfiguration);

  auto bad = MakeData(rng, 1);
  for (auto& b : bad) std::fill(b.shallow->begin(), b.shallow->end(), 1e308);
  cfg = {};
  cfg.standardize = false;
  cfg.epochs = 1;
  auto s = FusionModel::Build({false, true, false}, kC, kV, 9, 4);
  try {
    Train(s, bad, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
    EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos);
  }
}

TEST(Train, MissingOrMisshapedFeatures) {
  Rng rng(9);
  auto m = FusionModel::Build(FullMask(), kC, kV, 9, 4);
  auto b = MakeBundle(rng, 0);
  b.text.reset();
  EXPECT_EQ(KindOf([&] { m.Predict(b); }), ErrorKind::kInput);
  b = MakeBundle(rng, 0);
  b.deep->push_back(1.0);
  EXPECT_EQ(KindOf([&] { m.Predict(b); }), ErrorKind::kShape);
  b = MakeBundle(rng, 0);
  b.text->dim = kV + 1;
  EXPECT_EQ(KindOf([&] { m.Predict(b); }), ErrorKind::kShape);
}

TEST(Standardize, ShallowZScoreWithFloorAndDeepRms) {
  Rng rng(10);
  const auto data = MakeData(rng, 4);
  auto m = FusionModel::Build(FullMask(), kC, kV, 1, 4);
  FitStandardizers(m, data);
  const double n = static_cast<double>(data.size());
  for (int k : {0, 77, 255}) {
    double mean = 0, sq = 0;
    for (const auto& b : data) mean += (*b.shallow)[k] / n;
    for (const auto& b : data) sq += ((*b.shallow)[k] - mean) * ((*b.shallow)[k] - mean) / n;
    EXPECT_NEAR(m.shallow_standardizer().shift[k], mean, 1e-12);
    EXPECT_NEAR(m.shallow_standardizer().scale[k], 1.0 / std::max(std::sqrt(sq), 0.01), 1e-6);
  }
  for (int c = 0; c < kC; ++c) {
    double sq = 0;
    for (const auto& b : data) sq += (*b.deep)[c] * (*b.deep)[c] / n;
    EXPECT_EQ(m.deep_standardizer().shift[c], 0.0);
    EXPECT_NEAR(m.deep_standardizer().scale[c], 1.0 / std::sqrt(sq), 1e-9);
  }
}

TEST(Standardize, InverseFrequencyWeights) {
  std::vector<FeatureBundle> data(4);
  data[0].label = Category::kText;
  data[1].label = Category::kText;
  data[2].label = Category::kTitle;
  data[3].label = Category::kTable;
  const auto w = InverseFrequencyWeights(data);
  EXPECT_DOUBLE_EQ(w[0], 4.0 / 10.0);
  EXPECT_DOUBLE_EQ(w[1], 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(w[2], 0.0);
  EXPECT_DOUBLE_EQ(w[4], 4.0 / 5.0);
}

TEST(GradCheck, AnalyticGradientsMatchForEveryLayer) {
  Rng rng(11);
  const auto data = MakeData(rng, 2);
  auto m = FusionModel::Build(FullMask(), kC, kV, 12, 4);
  FitStandardizers(m, data);
  const auto r = GradientCheck(m, data);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_GT(r.checked, 100);
  bool mlp = false, head = false, se = false;
  for (const auto& [name, err] : r.per_param) {
    mlp |= name.find("mlp") != std::string::npos;
    head |= name.find("head") != std::string::npos;
    se |= name.find("se") != std::string::npos;
  }
  EXPECT_TRUE(mlp && head && se);
}

TEST(GradCheck, DetectsABrokenGradient) {
  Rng rng(12);
  const auto data = MakeData(rng, 2);
  auto m = FusionModel::Build(FullMask(), kC, kV, 13, 4);
  GradientCheckOptions opt;
  opt.analytic_perturbation = 0.05;
  EXPECT_GT(GradientCheck(m, data, opt).max_relative_error, 1e-2);
  EXPECT_DOUBLE_EQ(RelativeError(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(RelativeError(0.0, 1e-9), 1e-2);
}

TEST(GradCheck, ClassWeightedLossGradient) {
  Rng rng(13);
  const auto data = MakeData(rng, 3);
  auto m = FusionModel::Build({false, true, true}, kC, kV, 14, 4);
  const auto w = InverseFrequencyWeights(data);
  std::vector<const FeatureBundle*> ptrs;
  for (const auto& b : data) ptrs.push_back(&b);
  m.ZeroGrad();
  m.Loss(ptrs, &w, true);
  Param& p = m.head_weight();
  const double analytic = p.grad[3];
  const double h = 1e-5, orig = p.value[3];
  p.value[3] = orig + h;
  const double lp = m.Loss(ptrs, &w, false);
  p.value[3] = orig - h;
  const double lm = m.Loss(ptrs, &w, false);
  p.value[3] = orig;
  EXPECT_LT(RelativeError(analytic, (lp - lm) / (2 * h)), 1e-6);
}

// Changing a feature the mask excludes must leave predictions untouched.
TEST(Isolation, MaskedFeaturesAreIgnoredBitForBit) {
  Rng rng(14);
  for (const auto& mask : kAllMasks) {
    auto m = FusionModel::Build(mask, kC, kV, 15, 4);
    for (int t = 0; t < 20; ++t) {
      const auto base = MakeBundle(rng, t % kNumCategories);
      auto alt = base;
      if (!mask.deep) {
        for (double& v : *alt.deep) v = rng.Uniform(0, 100);
      }
      if (!mask.shallow) {
        for (double& v : *alt.shallow) v = rng.Uniform(0, 100);
      }
      if (!mask.text) alt.text->entries = {{0, 1.0}};
      const Logits a = m.ComputeLogits(base), b = m.ComputeLogits(alt);
      for (int k = 0; k < kNumCategories; ++k) ASSERT_EQ(a[k], b[k]) << mask.Label();
      auto stripped = base;
      if (!mask.deep) stripped.deep.reset();
      if (!mask.shallow) stripped.shallow.reset();
      if (!mask.text) stripped.text.reset();
      const Logits c = m.ComputeLogits(stripped);
      for (int k = 0; k < kNumCategories; ++k) ASSERT_EQ(a[k], c[k]);
    }
  }
}

TEST(Isolation, IncludedFeaturesMatter) {
  Rng rng(15);
  for (const auto& mask : kAllMasks) {
    auto m = FusionModel::Build(mask, kC, kV, 16, 4);
    const auto base = MakeBundle(rng, 0);
    auto alt = base;
    if (mask.deep) {
      for (double& v : *alt.deep) v += 1.0;
    }
    if (mask.shallow) {
      for (double& v : *alt.shallow) v = rng.Uniform(0, 1);
    }
    if (mask.text) alt.text->entries = {{kV - 1, 1.0}};
    EXPECT_NE(m.ComputeLogits(base), m.ComputeLogits(alt)) << mask.Label();
  }
}

TEST(Persistence, SaveLoadIsBitIdentical) {
  Rng rng(16);
  const auto data = MakeData(rng, 4);
  auto m = FusionModel::Build(FullMask(), kC, kV, 17, 4);
  TrainConfig cfg;
  cfg.epochs = 2;
  Train(m, data, cfg);
  m.fingerprints()["vocab"] = "abc";
  const fs::path p = fs::temp_directory_path() / "vtlayout_model.vtlm";
  m.Save(p);
  const auto r = FusionModel::Load(p, {FullMask(), kC, kV});
  EXPECT_EQ(r.fingerprints().at("vocab"), "abc");
  for (const auto& b : data) EXPECT_EQ(r.ComputeLogits(b), m.ComputeLogits(b));

  EXPECT_EQ(KindOf([&] { FusionModel::Load(p, {std::nullopt, std::nullopt, kV + 1}); }), ErrorKind::kCompatibility);
  EXPECT_EQ(KindOf([&] { FusionModel::Load(p, {AblationMask{true, true, false}, std::nullopt, std::nullopt}); }),
            ErrorKind::kCompatibility);

  auto bytes = ReadFileBytes(p);
  bytes.resize(bytes.size() - 100);
  WriteFileAtomic(p, bytes);
  EXPECT_EQ(KindOf([&] { FusionModel::Load(p); }), ErrorKind::kIntegrity);
  fs::remove(p);
}

TEST(Persistence, BackboneFileIsNotAModel) {
  TensorBundle b;
  b.manifest = R"({"kind":"backbone"})";
  EXPECT_EQ(KindOf([&] { FusionModel::FromTensors(b); }), ErrorKind::kCompatibility);
}

}  // namespace
}  // namespace vtlayout
