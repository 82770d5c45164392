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

#include "vtlayout/dvfe/backbone.hpp"

#include <cmath>
#include <json.hpp>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"

namespace vtlayout {

namespace {

std::unique_ptr<Layer> ConvRelu(const std::string& name, int in, int out, int stride) {
  auto seq = std::make_unique<Sequential>(name);
  seq->Add(std::make_unique<Conv2d>(name + ".conv", in, out, 3, stride));
  seq->Add(std::make_unique<Relu6>(name + ".act"));
  return seq;
}

std::unique_ptr<Layer> SeparableBlock(const std::string& name, int in, int out, int stride) {
  auto seq = std::make_unique<Sequential>(name);
  seq->Add(std::make_unique<DepthwiseConv2d>(name + ".dw", in, 3, stride));
  seq->Add(std::make_unique<Relu6>(name + ".dw_act"));
  seq->Add(std::make_unique<PointwiseConv2d>(name + ".pw", in, out));
  seq->Add(std::make_unique<Relu6>(name + ".pw_act"));
  return seq;
}

std::unique_ptr<Layer> InvertedResidual(const std::string& name, int in, int out, int stride, int expand) {
  Sequential body(name + ".body");
  const int hidden = in * expand;
  if (expand != 1) {
    body.Add(std::make_unique<PointwiseConv2d>(name + ".expand", in, hidden));
    body.Add(std::make_unique<Relu6>(name + ".expand_act"));
  }
  body.Add(std::make_unique<DepthwiseConv2d>(name + ".dw", hidden, 3, stride));
  body.Add(std::make_unique<Relu6>(name + ".dw_act"));
  body.Add(std::make_unique<PointwiseConv2d>(name + ".project", hidden, out));
  return std::make_unique<Residual>(name, std::move(body), stride == 1 && in == out);
}

// Document-like probe images: light background, dark strokes, colour patches.
std::vector<Tensor3> ProbeImages(std::uint64_t seed, int count, int size) {
  Rng rng(MixSeed(seed, 0x9B0BE));
  std::vector<Tensor3> images;
  for (int n = 0; n < count; ++n) {
    Tensor3 img(size, size, 3, rng.Uniform(0.9, 1.0));
    const int strokes = static_cast<int>(rng.UniformInt(4, 20));
    for (int s = 0; s < strokes; ++s) {
      const int w = static_cast<int>(rng.UniformInt(1, size / 2));
      const int h = static_cast<int>(rng.UniformInt(1, size / 4));
      const int x0 = static_cast<int>(rng.UniformInt(0, size - w));
      const int y0 = static_cast<int>(rng.UniformInt(0, size - h));
      const double r = rng.Uniform(), g = rng.Uniform(), b = rng.Uniform();
      const bool dark = rng.Bernoulli(0.6);
      for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
          if (dark && rng.Bernoulli(0.5)) continue;
          img.at(y, x, 0) = dark ? 0.1 * r : r;
          img.at(y, x, 1) = dark ? 0.1 * g : g;
          img.at(y, x, 2) = dark ? 0.1 * b : b;
        }
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

}  // namespace

Backbone::Backbone(std::string architecture, Sequential network, int channels)
    : architecture_(std::move(architecture)), network_(std::move(network)), channels_(channels) {}

FeatureMap Backbone::Forward(const Tensor3& input) const {
  if (input.c != 3) Fail(ErrorKind::kShape, "backbone input must have 3 channels");
  FeatureMap out = network_.Forward(input);
  if (out.c != channels_) Fail(ErrorKind::kShape, "backbone produced an unexpected channel count");
  return out;
}

void Backbone::Backward(const std::vector<Tensor3>& trace, const Tensor3& grad_out) {
  network_.BackwardTrace(trace, grad_out, false);
}

std::uint64_t Backbone::Fingerprint() const {
  Fnv1a h;
  h.Update(architecture_).UpdateU64(static_cast<std::uint64_t>(channels_));
  for (Param* p : const_cast<Sequential&>(network_).params()) {
    h.Update(p->name);
    for (double v : p->value) h.UpdateDouble(static_cast<double>(static_cast<float>(v)));
  }
  return h.digest();
}

TensorBundle Backbone::ToTensors() const {
  TensorBundle bundle;
  nlohmann::json manifest = {{"architecture", architecture_},
                             {"channels", channels_},
                             {"input_size", kDeepInputSize},
                             {"input_scale", "linear_0_1"}};
  bundle.manifest = manifest.dump();
  for (Param* p : const_cast<Sequential&>(network_).params()) {
    bundle.tensors.push_back({p->name, p->shape, p->value, TensorDtype::kFloat32});
  }
  return bundle;
}

void Backbone::LoadTensors(const TensorBundle& bundle) {
  if (!bundle.manifest.empty()) {
    const auto manifest = nlohmann::json::parse(bundle.manifest, nullptr, false);
    if (manifest.is_discarded()) Fail(ErrorKind::kIntegrity, "backbone manifest is not valid JSON");
    if (manifest.value("architecture", architecture_) != architecture_) {
      Fail(ErrorKind::kShape, "weight file is for backbone '" + manifest.value("architecture", std::string()) +
                                  "', not '" + architecture_ + "'");
    }
  }
  for (Param* p : network_.params()) {
    const NamedTensor* t = bundle.Find(p->name);
    if (t == nullptr) Fail(ErrorKind::kShape, "weight file lacks layer tensor " + p->name);
    if (t->shape != p->shape) Fail(ErrorKind::kShape, "weight tensor " + p->name + " has the wrong shape");
    p->value = t->data;
  }
  if (bundle.tensors.size() != network_.params().size()) {
    Fail(ErrorKind::kShape, "weight file has tensors this backbone does not use");
  }
}

std::unique_ptr<Backbone> BuildTinyBackbone() {
  Sequential net("tiny");
  net.Add(ConvRelu("stem", 3, 16, 2));
  const int widths[] = {16, 32, 64, 128, 256};
  for (int i = 0; i < 4; ++i) {
    net.Add(SeparableBlock("block" + std::to_string(i + 1), widths[i], widths[i + 1], 2));
  }
  return std::make_unique<Backbone>("tiny", std::move(net), kTinyChannels);
}

std::unique_ptr<Backbone> BuildReferenceBackbone() {
  struct Stage {
    int expand, out, repeats, stride;
  };
  constexpr Stage kStages[] = {{1, 16, 1, 1},  {6, 24, 2, 2},  {6, 32, 3, 2}, {6, 64, 4, 2},
                               {6, 96, 3, 1},  {6, 160, 3, 2}, {6, 320, 1, 1}};
  Sequential net("reference");
  net.Add(ConvRelu("stem", 3, 32, 2));
  int in = 32;
  int index = 0;
  for (const auto& s : kStages) {
    for (int r = 0; r < s.repeats; ++r) {
      net.Add(InvertedResidual("ir" + std::to_string(index++), in, s.out, r == 0 ? s.stride : 1, s.expand));
      in = s.out;
    }
  }
  auto head = std::make_unique<Sequential>("head");
  head->Add(std::make_unique<PointwiseConv2d>("head.conv", in, kReferenceChannels));
  head->Add(std::make_unique<Relu6>("head.act"));
  net.Add(std::move(head));
  return std::make_unique<Backbone>("reference", std::move(net), kReferenceChannels);
}

std::unique_ptr<Backbone> BuildBackbone(const std::string& architecture) {
  if (architecture == "tiny") return BuildTinyBackbone();
  if (architecture == "reference") return BuildReferenceBackbone();
  Fail(ErrorKind::kConfiguration, "unknown backbone '" + architecture + "' (expected tiny or reference)");
}

namespace {

void CalibrateLayers(Backbone& backbone, std::uint64_t seed) {
  const bool large = backbone.architecture() == "reference";
  const auto probes = ProbeImages(seed, large ? 4 : 8, large ? 64 : kDeepInputSize);
  std::vector<Layer*> weighted;
  backbone.network().CollectWeighted(weighted);
  for (Layer* target : weighted) {
    for (int iter = 0; iter < 2; ++iter) {
      double sum = 0.0, sum_sq = 0.0, count = 0.0;
      const LayerObserver observer = [&](const Layer& l, const Tensor3& out) {
        if (&l != target) return;
        for (double v : out.data) {
          sum += v;
          sum_sq += v * v;
        }
        count += static_cast<double>(out.data.size());
      };
      for (const auto& img : probes) backbone.network().Forward(img, &observer);
      const double mean = sum / count;
      const double var = std::max(sum_sq / count - mean * mean, 0.0);
      if (var < 1e-12) break;
      const double scale = 1.0 / std::sqrt(var);
      for (double& v : target->params()[0]->value) v *= scale;
    }
  }
}

}  // namespace

void InitializeBackbone(Backbone& backbone, std::uint64_t seed, bool calibrate) {
  Rng rng(MixSeed(seed, 0xBAC6B0E));
  HeInit(backbone.network(), rng);
  if (calibrate) CalibrateLayers(backbone, seed);
  // Keep in-memory weights identical to what a float32 weight file holds.
  for (Param* p : backbone.params()) {
    for (double& v : p->value) v = static_cast<double>(static_cast<float>(v));
  }
}

void SaveBackbone(const Backbone& backbone, const std::filesystem::path& path) {
  WriteTensorFile(path, backbone.ToTensors());
}

std::unique_ptr<Backbone> LoadBackbone(const std::filesystem::path& path) {
  const TensorBundle bundle = ReadTensorFile(path);
  const auto manifest = nlohmann::json::parse(bundle.manifest, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("architecture")) {
    Fail(ErrorKind::kIntegrity, "weight file manifest lacks an architecture name");
  }
  auto backbone = BuildBackbone(manifest["architecture"].get<std::string>());
  if (manifest.value("channels", backbone->channels()) != backbone->channels()) {
    Fail(ErrorKind::kShape, "weight file channel count disagrees with its architecture");
  }
  backbone->LoadTensors(bundle);
  return backbone;
}

}  // namespace vtlayout
