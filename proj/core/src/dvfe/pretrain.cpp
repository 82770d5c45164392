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

#include "vtlayout/dvfe/pretrain.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/dvfe/layers.hpp"
#include "vtlayout/dvfe/preprocess.hpp"

namespace vtlayout {

PretrainSample MakePretrainSample(const BlockCrop& crop) {
  if (!crop.label) Fail(ErrorKind::kData, "pretraining needs labelled blocks");
  const PaddedInput in = PadResize(crop);
  PretrainSample s;
  s.label = *crop.label;
  s.pixels.resize(in.pixels.data.size());
  for (std::size_t i = 0; i < s.pixels.size(); ++i) {
    s.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(in.pixels.data[i], 0.0, 1.0) * 255.0));
  }
  return s;
}

PretrainResult PretrainBackbone(Backbone& backbone, std::span<const PretrainSample> samples,
                                const PretrainConfig& cfg) {
  if (cfg.epochs <= 0 || cfg.batch_size <= 0 || !(cfg.learning_rate > 0.0)) {
    Fail(ErrorKind::kConfiguration, "invalid pretraining settings");
  }
  if (samples.empty()) Fail(ErrorKind::kData, "no pretraining samples");
  const int c = backbone.channels();
  const std::size_t expect = static_cast<std::size_t>(kDeepInputSize) * kDeepInputSize * 3;
  for (const auto& s : samples) {
    if (s.pixels.size() != expect) Fail(ErrorKind::kShape, "pretraining sample has the wrong size");
  }

  Rng rng(MixSeed(cfg.seed, 0x9E7A));
  Param head_w("pretrain.head.weight", {c, kNumCategories});
  Param head_b("pretrain.head.bias", {kNumCategories});
  const double bound = std::sqrt(6.0 / c);
  for (double& v : head_w.value) v = rng.Uniform(-bound, bound);

  std::vector<Param*> params = backbone.params();
  params.push_back(&head_w);
  params.push_back(&head_b);
  std::vector<std::vector<double>> m1(params.size()), m2(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m1[i].assign(params[i]->size(), 0.0);
    m2[i].assign(params[i]->size(), 0.0);
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-7;

  std::array<double, kNumCategories> class_weight{};
  class_weight.fill(1.0);
  if (cfg.balance_classes) {
    std::array<double, kNumCategories> counts{};
    for (const auto& s : samples) counts[CategoryCode(s.label)] += 1.0;
    int present = 0;
    for (double n : counts) present += n > 0 ? 1 : 0;
    for (int k = 0; k < kNumCategories; ++k) {
      class_weight[k] = counts[k] > 0 ? static_cast<double>(samples.size()) / (present * counts[k]) : 0.0;
    }
  }

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  PretrainResult result;
  std::int64_t step = 0;
  Tensor3 x(kDeepInputSize, kDeepInputSize, 3);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double inv_n = 1.0 / static_cast<double>(end - start);
      for (Param* p : params) p->ZeroGrad();
      for (std::size_t k = start; k < end; ++k) {
        const PretrainSample& s = samples[order[k]];
        for (std::size_t i = 0; i < s.pixels.size(); ++i) x.data[i] = s.pixels[i] / 255.0;
        const auto trace = backbone.ForwardTrace(x);
        const Tensor3& out = trace.back();
        const double area = static_cast<double>(out.h) * out.w;
        std::vector<double> z(static_cast<std::size_t>(c), 0.0);
        for (int yy = 0; yy < out.h; ++yy)
          for (int xx = 0; xx < out.w; ++xx)
            for (int ch = 0; ch < c; ++ch) z[ch] += out.at(yy, xx, ch);
        for (double& v : z) v /= area;
        std::array<double, kNumCategories> logits{};
        for (int j = 0; j < kNumCategories; ++j) {
          double a = head_b.value[j];
          for (int ch = 0; ch < c; ++ch) a += z[ch] * head_w.value[static_cast<std::size_t>(ch) * kNumCategories + j];
          logits[j] = a;
        }
        const double mx = *std::max_element(logits.begin(), logits.end());
        double denom = 0.0;
        for (double l : logits) denom += std::exp(l - mx);
        const int y = CategoryCode(s.label);
        loss_sum += -(logits[y] - mx - std::log(denom));
        if (std::max_element(logits.begin(), logits.end()) - logits.begin() == y) ++correct;
        std::array<double, kNumCategories> dl{};
        for (int j = 0; j < kNumCategories; ++j) {
          dl[j] = (std::exp(logits[j] - mx) / denom - (j == y ? 1.0 : 0.0)) * inv_n * class_weight[y];
          head_b.grad[j] += dl[j];
        }
        Tensor3 grad_out(out.h, out.w, c);
        std::vector<double> dz(static_cast<std::size_t>(c), 0.0);
        for (int ch = 0; ch < c; ++ch) {
          double g = 0.0;
          for (int j = 0; j < kNumCategories; ++j) {
            const std::size_t w = static_cast<std::size_t>(ch) * kNumCategories + j;
            head_w.grad[w] += z[ch] * dl[j];
            g += head_w.value[w] * dl[j];
          }
          dz[ch] = g / area;
        }
        for (int yy = 0; yy < out.h; ++yy)
          for (int xx = 0; xx < out.w; ++xx)
            for (int ch = 0; ch < c; ++ch) grad_out.at(yy, xx, ch) = dz[ch];
        backbone.Backward(trace, grad_out);
      }
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t p = 0; p < params.size(); ++p) {
        Param& prm = *params[p];
        for (std::size_t i = 0; i < prm.size(); ++i) {
          const double g = prm.grad[i];
          m1[p][i] = kBeta1 * m1[p][i] + (1.0 - kBeta1) * g;
          m2[p][i] = kBeta2 * m2[p][i] + (1.0 - kBeta2) * g * g;
          prm.value[i] -= cfg.learning_rate * (m1[p][i] / c1) / (std::sqrt(m2[p][i] / c2) + kEps);
        }
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(samples.size());
    if (!std::isfinite(mean_loss)) {
      Fail(ErrorKind::kDivergence, "backbone pretraining diverged at epoch " + std::to_string(epoch));
    }
    result.epoch_loss.push_back(mean_loss);
    result.final_accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    spdlog::debug("backbone pretraining epoch {} loss {:.4f} accuracy {:.4f}", epoch + 1, mean_loss,
                  result.final_accuracy);
  }
  for (Param* p : backbone.params()) {
    p->ZeroGrad();
    for (double& v : p->value) v = static_cast<double>(static_cast<float>(v));
  }
  return result;
}

}  // namespace vtlayout
