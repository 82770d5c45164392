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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vtlayout/common/rng.hpp"
#include "vtlayout/dvfe/tensor.hpp"

namespace vtlayout {

struct Param {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  Param() = default;
  Param(std::string n, std::vector<std::int64_t> s);
  std::size_t size() const { return value.size(); }
  void ZeroGrad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

class Layer;
using LayerObserver = std::function<void(const Layer&, const Tensor3&)>;

class Layer {
 public:
  explicit Layer(std::string name) : name_(std::move(name)) {}
  virtual ~Layer() = default;

  virtual Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const = 0;
  // Accumulates parameter gradients and returns the gradient w.r.t. `in`.
  virtual Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) = 0;
  // Accumulates parameter gradients only.
  virtual void BackwardParams(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
    (void)Backward(in, out, grad_out);
  }
  virtual std::vector<Param*> params() { return {}; }
  // Layers whose output scale is calibrated at initialization, in forward order.
  virtual void CollectWeighted(std::vector<Layer*>& out) { (void)out; }
  virtual std::unique_ptr<Layer> Clone() const = 0;

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Full convolution, weights HWIO [k, k, in, out], zero padding (k-1)/2.
class Conv2d : public Layer {
 public:
  Conv2d(std::string name, int in, int out, int kernel, int stride);
  Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const override;
  Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  void BackwardParams(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  std::vector<Param*> params() override { return {&weight_, &bias_}; }
  void CollectWeighted(std::vector<Layer*>& out) override { out.push_back(this); }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Conv2d>(*this); }

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int stride() const { return stride_; }

 private:
  int in_, out_, kernel_, stride_;
  Param weight_, bias_;
};

// Per-channel k x k convolution, weights [k, k, c].
class DepthwiseConv2d : public Layer {
 public:
  DepthwiseConv2d(std::string name, int channels, int kernel, int stride);
  Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const override;
  Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  std::vector<Param*> params() override { return {&weight_, &bias_}; }
  void CollectWeighted(std::vector<Layer*>& out) override { out.push_back(this); }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<DepthwiseConv2d>(*this); }

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  int stride() const { return stride_; }

 private:
  int channels_, kernel_, stride_;
  Param weight_, bias_;
};

// 1x1 convolution, weights [in, out].
class PointwiseConv2d : public Layer {
 public:
  PointwiseConv2d(std::string name, int in, int out);
  Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const override;
  Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  std::vector<Param*> params() override { return {&weight_, &bias_}; }
  void CollectWeighted(std::vector<Layer*>& out) override { out.push_back(this); }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<PointwiseConv2d>(*this); }

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }

 private:
  int in_, out_;
  Param weight_, bias_;
};

class Relu6 : public Layer {
 public:
  explicit Relu6(std::string name) : Layer(std::move(name)) {}
  Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const override;
  Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Relu6>(*this); }
};

class Sequential : public Layer {
 public:
  explicit Sequential(std::string name) : Layer(std::move(name)) {}
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) = default;
  Sequential& operator=(Sequential&&) = default;

  // Nested sequentials are spliced in, so one trace covers every layer.
  void Add(std::unique_ptr<Layer> layer);
  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }

  Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const override;
  // Returns the input followed by every layer's output.
  std::vector<Tensor3> ForwardTrace(const Tensor3& in) const;
  // With `input_grad` false the first layer skips its input gradient and an
  // empty tensor is returned.
  Tensor3 BackwardTrace(const std::vector<Tensor3>& trace, const Tensor3& grad_out, bool input_grad = true);
  Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  std::vector<Param*> params() override;
  void CollectWeighted(std::vector<Layer*>& out) override;
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Sequential>(*this); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// body(x) + x when the shapes agree, else body(x).
class Residual : public Layer {
 public:
  Residual(std::string name, Sequential body, bool skip);
  Tensor3 Forward(const Tensor3& in, const LayerObserver* observer = nullptr) const override;
  Tensor3 Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) override;
  std::vector<Param*> params() override { return body_.params(); }
  void CollectWeighted(std::vector<Layer*>& out) override { body_.CollectWeighted(out); }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Residual>(*this); }
  bool skip() const { return skip_; }

 private:
  Sequential body_;
  bool skip_;
};

// He-normal weights, zero biases.
void HeInit(Layer& layer, Rng& rng);

int ConvOutputSize(int in, int kernel, int stride);

}  // namespace vtlayout
