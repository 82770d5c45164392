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

#include <vector>

#include "vtlayout/common/rng.hpp"
#include "vtlayout/dvfe/layers.hpp"
#include "vtlayout/dvfe/tensor.hpp"

namespace vtlayout {

inline constexpr int kDefaultSeRatio = 16;

// s = sigmoid(W2 relu(W1 z + b1) + b2), W1: (C/r) x C, W2: C x (C/r).
class SeBlock {
 public:
  SeBlock(int channels, int ratio);

  int channels() const { return channels_; }
  int ratio() const { return ratio_; }
  int hidden() const { return channels_ / ratio_; }

  Param& w1() { return w1_; }
  Param& b1() { return b1_; }
  Param& w2() { return w2_; }
  Param& b2() { return b2_; }
  const Param& w1() const { return w1_; }
  const Param& b1() const { return b1_; }
  const Param& w2() const { return w2_; }
  const Param& b2() const { return b2_; }
  std::vector<Param*> params() { return {&w1_, &b1_, &w2_, &b2_}; }

  // Uniform fan-in initialization, zero biases.
  void Initialize(Rng& rng);

  struct Trace {
    std::vector<double> pre_hidden;
    std::vector<double> hidden;
    std::vector<double> scale;
  };

  std::vector<double> Excite(const std::vector<double>& squeezed, Trace* trace = nullptr) const;
  // Backpropagates dL/ds to dL/dz through the excitation only.
  std::vector<double> ExciteBackward(const std::vector<double>& squeezed, const Trace& trace,
                                     const std::vector<double>& grad_scale);

  // Gated pooled vector s(z) * z and its gradient w.r.t. z.
  std::vector<double> GatePooled(const std::vector<double>& pooled, Trace* trace = nullptr) const;
  std::vector<double> GatePooledBackward(const std::vector<double>& pooled, const Trace& trace,
                                         const std::vector<double>& grad_out);

 private:
  int channels_;
  int ratio_;
  Param w1_, b1_, w2_, b2_;
};

std::vector<double> GlobalAveragePool(const FeatureMap& map);
FeatureMap GlobalAveragePoolBackward(int h, int w, const std::vector<double>& grad);

// Squeeze, excite, and rescale each channel map.
FeatureMap SeRecalibrate(const FeatureMap& map, const SeBlock& se);
FeatureMap SeRecalibrateBackward(const FeatureMap& map, SeBlock& se, const FeatureMap& grad_out);

}  // namespace vtlayout
