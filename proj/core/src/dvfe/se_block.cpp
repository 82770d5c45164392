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

#include "vtlayout/dvfe/se_block.hpp"

#include <cmath>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

SeBlock::SeBlock(int channels, int ratio)
    : channels_(channels), ratio_(ratio) {
  if (ratio <= 0 || channels <= 0 || channels % ratio != 0) {
    Fail(ErrorKind::kConfiguration, "SE channels " + std::to_string(channels) + " not divisible by ratio " +
                                        std::to_string(ratio));
  }
  const int h = channels / ratio;
  w1_ = Param("se.w1", {h, channels});
  b1_ = Param("se.b1", {h});
  w2_ = Param("se.w2", {channels, h});
  b2_ = Param("se.b2", {channels});
}

void SeBlock::Initialize(Rng& rng) {
  const double a1 = std::sqrt(6.0 / channels_);
  for (double& v : w1_.value) v = rng.Uniform(-a1, a1);
  const double a2 = std::sqrt(6.0 / hidden());
  for (double& v : w2_.value) v = rng.Uniform(-a2, a2);
  std::fill(b1_.value.begin(), b1_.value.end(), 0.0);
  std::fill(b2_.value.begin(), b2_.value.end(), 0.0);
}

std::vector<double> SeBlock::Excite(const std::vector<double>& z, Trace* trace) const {
  if (static_cast<int>(z.size()) != channels_) Fail(ErrorKind::kShape, "SE block channel mismatch");
  const int h = hidden();
  std::vector<double> pre(h), act(h), s(channels_);
  for (int j = 0; j < h; ++j) {
    double acc = b1_.value[j];
    const double* row = w1_.value.data() + static_cast<std::size_t>(j) * channels_;
    for (int c = 0; c < channels_; ++c) acc += row[c] * z[c];
    pre[j] = acc;
    act[j] = acc > 0 ? acc : 0.0;
  }
  for (int c = 0; c < channels_; ++c) {
    double acc = b2_.value[c];
    const double* row = w2_.value.data() + static_cast<std::size_t>(c) * h;
    for (int j = 0; j < h; ++j) acc += row[j] * act[j];
    s[c] = Sigmoid(acc);
  }
  if (trace != nullptr) *trace = {pre, act, s};
  return s;
}

std::vector<double> SeBlock::ExciteBackward(const std::vector<double>& z, const Trace& t,
                                            const std::vector<double>& grad_s) {
  const int h = hidden();
  std::vector<double> grad_act(h, 0.0);
  for (int c = 0; c < channels_; ++c) {
    const double g = grad_s[c] * t.scale[c] * (1.0 - t.scale[c]);
    b2_.grad[c] += g;
    double* grow = w2_.grad.data() + static_cast<std::size_t>(c) * h;
    const double* row = w2_.value.data() + static_cast<std::size_t>(c) * h;
    for (int j = 0; j < h; ++j) {
      grow[j] += g * t.hidden[j];
      grad_act[j] += g * row[j];
    }
  }
  std::vector<double> grad_z(channels_, 0.0);
  for (int j = 0; j < h; ++j) {
    if (t.pre_hidden[j] <= 0) continue;
    const double g = grad_act[j];
    b1_.grad[j] += g;
    double* grow = w1_.grad.data() + static_cast<std::size_t>(j) * channels_;
    const double* row = w1_.value.data() + static_cast<std::size_t>(j) * channels_;
    for (int c = 0; c < channels_; ++c) {
      grow[c] += g * z[c];
      grad_z[c] += g * row[c];
    }
  }
  return grad_z;
}

std::vector<double> SeBlock::GatePooled(const std::vector<double>& z, Trace* trace) const {
  std::vector<double> s = Excite(z, trace);
  for (int c = 0; c < channels_; ++c) s[c] *= z[c];
  return s;
}

std::vector<double> SeBlock::GatePooledBackward(const std::vector<double>& z, const Trace& t,
                                                const std::vector<double>& grad_out) {
  std::vector<double> grad_s(channels_);
  for (int c = 0; c < channels_; ++c) grad_s[c] = grad_out[c] * z[c];
  std::vector<double> grad_z = ExciteBackward(z, t, grad_s);
  for (int c = 0; c < channels_; ++c) grad_z[c] += grad_out[c] * t.scale[c];
  return grad_z;
}

std::vector<double> GlobalAveragePool(const FeatureMap& map) {
  std::vector<double> out(static_cast<std::size_t>(map.c), 0.0);
  const std::size_t pixels = static_cast<std::size_t>(map.h) * map.w;
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* v = map.data.data() + p * map.c;
    for (int c = 0; c < map.c; ++c) out[c] += v[c];
  }
  for (double& v : out) v /= static_cast<double>(pixels);
  return out;
}

FeatureMap GlobalAveragePoolBackward(int h, int w, const std::vector<double>& grad) {
  const int c = static_cast<int>(grad.size());
  FeatureMap out(h, w, c);
  const double inv = 1.0 / (static_cast<double>(h) * w);
  for (std::size_t p = 0; p < static_cast<std::size_t>(h) * w; ++p) {
    for (int ch = 0; ch < c; ++ch) out.data[p * c + ch] = grad[ch] * inv;
  }
  return out;
}

FeatureMap SeRecalibrate(const FeatureMap& map, const SeBlock& se) {
  if (map.c != se.channels()) Fail(ErrorKind::kShape, "SE block channel mismatch");
  const std::vector<double> s = se.Excite(GlobalAveragePool(map));
  FeatureMap out = map;
  const std::size_t pixels = static_cast<std::size_t>(map.h) * map.w;
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int c = 0; c < map.c; ++c) out.data[p * map.c + c] *= s[c];
  }
  return out;
}

FeatureMap SeRecalibrateBackward(const FeatureMap& map, SeBlock& se, const FeatureMap& grad_out) {
  const std::vector<double> z = GlobalAveragePool(map);
  SeBlock::Trace trace;
  const std::vector<double> s = se.Excite(z, &trace);
  const std::size_t pixels = static_cast<std::size_t>(map.h) * map.w;
  std::vector<double> grad_s(static_cast<std::size_t>(map.c), 0.0);
  FeatureMap grad_in(map.h, map.w, map.c);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int c = 0; c < map.c; ++c) {
      const std::size_t i = p * map.c + c;
      grad_s[c] += grad_out.data[i] * map.data[i];
      grad_in.data[i] = grad_out.data[i] * s[c];
    }
  }
  const std::vector<double> grad_z = se.ExciteBackward(z, trace, grad_s);
  const FeatureMap via_pool = GlobalAveragePoolBackward(map.h, map.w, grad_z);
  for (std::size_t i = 0; i < grad_in.data.size(); ++i) grad_in.data[i] += via_pool.data[i];
  return grad_in;
}

}  // namespace vtlayout
