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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vtlayout/dvfe/layers.hpp"
#include "vtlayout/dvfe/preprocess.hpp"
#include "vtlayout/dvfe/tensor_file.hpp"

namespace vtlayout {

inline constexpr int kReferenceChannels = 1280;
inline constexpr int kTinyChannels = 256;

class Backbone {
 public:
  Backbone(std::string architecture, Sequential network, int channels);

  const std::string& architecture() const { return architecture_; }
  int channels() const { return channels_; }

  FeatureMap Forward(const Tensor3& input) const;
  FeatureMap Forward(const PaddedInput& input) const { return Forward(input.pixels); }

  std::vector<Tensor3> ForwardTrace(const Tensor3& input) const { return network_.ForwardTrace(input); }
  // Accumulates weight gradients from dL/d(output map).
  void Backward(const std::vector<Tensor3>& trace, const Tensor3& grad_out);

  std::vector<Param*> params() { return network_.params(); }
  Sequential& network() { return network_; }

  // Stable hash of architecture and weights.
  std::uint64_t Fingerprint() const;

  TensorBundle ToTensors() const;
  // Throws kShape naming the offending tensor.
  void LoadTensors(const TensorBundle& bundle);

 private:
  std::string architecture_;
  Sequential network_;
  int channels_;
};

// Stem conv + 4 stride-2 depthwise-separable blocks, 256 output channels.
std::unique_ptr<Backbone> BuildTinyBackbone();
// Inverted-residual stack (MobileNetV2 layout, no batch norm), 1280 channels.
std::unique_ptr<Backbone> BuildReferenceBackbone();
std::unique_ptr<Backbone> BuildBackbone(const std::string& architecture);

// He initialization followed by data-driven rescaling so every weighted
// layer emits unit-variance activations on a fixed set of probe pages.
void InitializeBackbone(Backbone& backbone, std::uint64_t seed, bool calibrate = true);

void SaveBackbone(const Backbone& backbone, const std::filesystem::path& path);
std::unique_ptr<Backbone> LoadBackbone(const std::filesystem::path& path);

}  // namespace vtlayout
