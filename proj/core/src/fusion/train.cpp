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

#include "vtlayout/fusion/train.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/rng.hpp"

namespace vtlayout {

void ValidateTrainConfig(const TrainConfig& cfg) {
  if (cfg.batch_size <= 0) Fail(ErrorKind::kConfiguration, "train.batch_size must be positive");
  if (cfg.epochs < 0) Fail(ErrorKind::kConfiguration, "train.epochs must be >= 0");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    Fail(ErrorKind::kConfiguration, "train.lr must be positive");
  }
  if (!(cfg.weight_decay >= 0.0)) Fail(ErrorKind::kConfiguration, "train.weight_decay must be >= 0");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.epsilon > 0.0)) {
    Fail(ErrorKind::kConfiguration, "invalid Adam hyper-parameters");
  }
}

// Bins that are almost always empty would otherwise blow up unseen values.
constexpr double kShallowScaleFloor = 0.01;

void FitStandardizers(FusionModel& model, std::span<const FeatureBundle> data) {
  if (data.empty()) return;
  const double n = static_cast<double>(data.size());
  if (model.mask().shallow) {
    Standardizer s{std::vector<double>(kHistogramBins, 0.0), std::vector<double>(kHistogramBins, 1.0)};
    std::vector<double> sq(kHistogramBins, 0.0);
    for (const auto& b : data) {
      if (!b.shallow) Fail(ErrorKind::kInput, "bundle lacks the SVFE feature");
      for (int k = 0; k < kHistogramBins; ++k) {
        s.shift[k] += (*b.shallow)[k];
        sq[k] += (*b.shallow)[k] * (*b.shallow)[k];
      }
    }
    for (int k = 0; k < kHistogramBins; ++k) {
      s.shift[k] /= n;
      const double var = std::max(sq[k] / n - s.shift[k] * s.shift[k], 0.0);
      s.scale[k] = 1.0 / std::max(std::sqrt(var), kShallowScaleFloor);
    }
    model.SetShallowStandardizer(std::move(s));
  }
  if (model.mask().deep) {
    const int c = model.deep_channels();
    Standardizer s{std::vector<double>(static_cast<std::size_t>(c), 0.0),
                   std::vector<double>(static_cast<std::size_t>(c), 1.0)};
    std::vector<double> sq(static_cast<std::size_t>(c), 0.0);
    for (const auto& b : data) {
      const std::vector<double> z = model.RawDeep(b);
      for (int k = 0; k < c; ++k) sq[k] += z[k] * z[k];
    }
    for (int k = 0; k < c; ++k) {
      const double rms = std::sqrt(sq[k] / n);
      s.scale[k] = rms > 1e-12 ? 1.0 / rms : 1.0;
    }
    model.SetDeepStandardizer(std::move(s));
  }
}

std::array<double, kNumCategories> InverseFrequencyWeights(std::span<const FeatureBundle> data) {
  std::array<double, kNumCategories> counts{};
  for (const auto& b : data) {
    if (b.label) counts[CategoryCode(*b.label)] += 1.0;
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::array<double, kNumCategories> w{};
  for (int k = 0; k < kNumCategories; ++k) w[k] = counts[k] > 0 ? total / (kNumCategories * counts[k]) : 0.0;
  return w;
}

TrainResult Train(FusionModel& model, std::span<const FeatureBundle> data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  ValidateTrainConfig(cfg);
  if (data.empty()) Fail(ErrorKind::kData, "training set is empty");
  for (const auto& b : data) {
    if (!b.label) Fail(ErrorKind::kData, "training bundle for block " + std::to_string(b.block_id) + " is unlabeled");
  }
  if (cfg.standardize) FitStandardizers(model, data);
  const auto weights = InverseFrequencyWeights(data);
  const auto* class_weights = cfg.class_weights ? &weights : nullptr;

  std::vector<Param*> params = model.params();
  std::vector<std::vector<double>> m1(params.size()), m2(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m1[i].assign(params[i]->size(), 0.0);
    m2[i].assign(params[i]->size(), 0.0);
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(MixSeed(cfg.seed, 0x7A1E));
  TrainResult result;
  std::int64_t step = 0;
  std::int64_t batch_index = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<const FeatureBundle*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&data[order[i]]);
      model.ZeroGrad();
      const double loss = model.Loss(batch, class_weights, true);
      if (!std::isfinite(loss)) {
        Fail(ErrorKind::kDivergence, "training loss became non-finite at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(batch_index));
      }
      ++step;
      ++batch_index;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < params.size(); ++p) {
        Param& prm = *params[p];
        const bool decay = cfg.weight_decay > 0.0 && prm.shape.size() > 1;
        for (std::size_t i = 0; i < prm.size(); ++i) {
          const double g = prm.grad[i] + (decay ? cfg.weight_decay * prm.value[i] : 0.0);
          m1[p][i] = cfg.beta1 * m1[p][i] + (1.0 - cfg.beta1) * g;
          m2[p][i] = cfg.beta2 * m2[p][i] + (1.0 - cfg.beta2) * g * g;
          prm.value[i] -= cfg.learning_rate * (m1[p][i] / c1) / (std::sqrt(m2[p][i] / c2) + cfg.epsilon);
        }
      }
      epoch_loss += loss * static_cast<double>(end - start);
      seen += end - start;
    }
    epoch_loss /= static_cast<double>(seen);
    result.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  model.ZeroGrad();
  return result;
}

double RelativeError(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-7});
  return std::abs(analytic - numeric) / denom;
}

GradientCheckResult GradientCheck(FusionModel& model, std::span<const FeatureBundle> bundles,
                                  const GradientCheckOptions& options) {
  std::vector<const FeatureBundle*> batch;
  for (const auto& b : bundles) batch.push_back(&b);
  model.ZeroGrad();
  model.Loss(batch, nullptr, true);
  const std::uint64_t signature = model.ActivationSignature(batch);
  GradientCheckResult result;
  Rng rng(MixSeed(options.seed, 0x6AC4));
  for (Param* p : model.params()) {
    const std::vector<double> analytic = p->grad;
    const auto n = static_cast<std::int64_t>(p->size());
    std::vector<std::int64_t> coords(static_cast<std::size_t>(n));
    std::iota(coords.begin(), coords.end(), 0);
    rng.Shuffle(std::span<std::int64_t>(coords));
    double worst = 0.0;
    int taken = 0;
    for (std::int64_t idx : coords) {
      if (taken >= options.coords_per_param) break;
      const double original = p->value[idx];
      p->value[idx] = original + options.step;
      const bool plus_ok = model.ActivationSignature(batch) == signature;
      const double lp = model.Loss(batch, nullptr, false);
      p->value[idx] = original - options.step;
      const bool minus_ok = model.ActivationSignature(batch) == signature;
      const double lm = model.Loss(batch, nullptr, false);
      p->value[idx] = original;
      if (!plus_ok || !minus_ok) {
        ++result.skipped_at_kinks;
        continue;
      }
      const double numeric = (lp - lm) / (2.0 * options.step);
      const double a = analytic[idx] * (1.0 + options.analytic_perturbation);
      worst = std::max(worst, RelativeError(a, numeric));
      ++taken;
      ++result.checked;
    }
    result.per_param[p->name] = worst;
    result.max_relative_error = std::max(result.max_relative_error, worst);
  }
  model.ZeroGrad();
  return result;
}

}  // namespace vtlayout
