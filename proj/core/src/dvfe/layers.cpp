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

#include "vtlayout/dvfe/layers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;
using CVec = Eigen::Map<const Eigen::VectorXd>;

void CheckChannels(const Layer& layer, const Tensor3& in, int expected) {
  if (in.c != expected) {
    Fail(ErrorKind::kShape, "layer " + layer.name() + " expects " + std::to_string(expected) + " channels, got " +
                                std::to_string(in.c));
  }
}

// Patch matrix: one row per output pixel, columns ordered (ky, kx, ci).
MatR Im2Col(const Tensor3& in, int kernel, int stride, int ho, int wo) {
  const int pad = (kernel - 1) / 2;
  MatR cols = MatR::Zero(static_cast<Eigen::Index>(ho) * wo, static_cast<Eigen::Index>(kernel) * kernel * in.c);
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      double* row = cols.data() + (static_cast<Eigen::Index>(oy) * wo + ox) * cols.cols();
      for (int ky = 0; ky < kernel; ++ky) {
        const int iy = oy * stride + ky - pad;
        if (iy < 0 || iy >= in.h) continue;
        for (int kx = 0; kx < kernel; ++kx) {
          const int ix = ox * stride + kx - pad;
          if (ix < 0 || ix >= in.w) continue;
          std::copy_n(in.data.data() + in.index(iy, ix, 0), in.c, row + (ky * kernel + kx) * in.c);
        }
      }
    }
  }
  return cols;
}

void Col2Im(const MatR& cols, int kernel, int stride, int ho, int wo, Tensor3& grad_in) {
  const int pad = (kernel - 1) / 2;
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      const double* row = cols.data() + (static_cast<Eigen::Index>(oy) * wo + ox) * cols.cols();
      for (int ky = 0; ky < kernel; ++ky) {
        const int iy = oy * stride + ky - pad;
        if (iy < 0 || iy >= grad_in.h) continue;
        for (int kx = 0; kx < kernel; ++kx) {
          const int ix = ox * stride + kx - pad;
          if (ix < 0 || ix >= grad_in.w) continue;
          double* dst = grad_in.data.data() + grad_in.index(iy, ix, 0);
          const double* src = row + (ky * kernel + kx) * grad_in.c;
          for (int c = 0; c < grad_in.c; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

void Observe(const LayerObserver* observer, const Layer& layer, const Tensor3& out) {
  if (observer != nullptr) (*observer)(layer, out);
}

}  // namespace

Param::Param(std::string n, std::vector<std::int64_t> s) : name(std::move(n)), shape(std::move(s)) {
  const auto count = std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
  value.assign(static_cast<std::size_t>(count), 0.0);
  grad.assign(static_cast<std::size_t>(count), 0.0);
}

int ConvOutputSize(int in, int kernel, int stride) {
  const int pad = (kernel - 1) / 2;
  return (in + 2 * pad - kernel) / stride + 1;
}

Conv2d::Conv2d(std::string name, int in, int out, int kernel, int stride)
    : Layer(name), in_(in), out_(out), kernel_(kernel), stride_(stride),
      weight_(name + ".weight", {kernel, kernel, in, out}), bias_(name + ".bias", {out}) {}

Tensor3 Conv2d::Forward(const Tensor3& in, const LayerObserver* observer) const {
  CheckChannels(*this, in, in_);
  const int ho = ConvOutputSize(in.h, kernel_, stride_);
  const int wo = ConvOutputSize(in.w, kernel_, stride_);
  const MatR cols = Im2Col(in, kernel_, stride_, ho, wo);
  Tensor3 out(ho, wo, out_);
  MapR o(out.data.data(), static_cast<Eigen::Index>(ho) * wo, out_);
  o.noalias() = cols * CMapR(weight_.value.data(), cols.cols(), out_);
  o.rowwise() += CVec(bias_.value.data(), out_).transpose();
  Observe(observer, *this, out);
  return out;
}

void Conv2d::BackwardParams(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  const MatR cols = Im2Col(in, kernel_, stride_, out.h, out.w);
  CMapR g(grad_out.data.data(), static_cast<Eigen::Index>(out.h) * out.w, out_);
  MapR(weight_.grad.data(), cols.cols(), out_).noalias() += cols.transpose() * g;
  Eigen::Map<Eigen::VectorXd>(bias_.grad.data(), out_) += g.colwise().sum().transpose();
}

Tensor3 Conv2d::Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  BackwardParams(in, out, grad_out);
  const int kk = kernel_ * kernel_ * in_;
  CMapR g(grad_out.data.data(), static_cast<Eigen::Index>(out.h) * out.w, out_);
  const MatR dcols = g * CMapR(weight_.value.data(), kk, out_).transpose();
  Tensor3 grad_in(in.h, in.w, in.c);
  Col2Im(dcols, kernel_, stride_, out.h, out.w, grad_in);
  return grad_in;
}

DepthwiseConv2d::DepthwiseConv2d(std::string name, int channels, int kernel, int stride)
    : Layer(name), channels_(channels), kernel_(kernel), stride_(stride),
      weight_(name + ".weight", {kernel, kernel, channels}), bias_(name + ".bias", {channels}) {}

Tensor3 DepthwiseConv2d::Forward(const Tensor3& in, const LayerObserver* observer) const {
  CheckChannels(*this, in, channels_);
  const int pad = (kernel_ - 1) / 2;
  const int ho = ConvOutputSize(in.h, kernel_, stride_);
  const int wo = ConvOutputSize(in.w, kernel_, stride_);
  Tensor3 out(ho, wo, channels_);
  const double* w = weight_.value.data();
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      double* dst = out.data.data() + out.index(oy, ox, 0);
      std::copy_n(bias_.value.data(), channels_, dst);
      for (int ky = 0; ky < kernel_; ++ky) {
        const int iy = oy * stride_ + ky - pad;
        if (iy < 0 || iy >= in.h) continue;
        for (int kx = 0; kx < kernel_; ++kx) {
          const int ix = ox * stride_ + kx - pad;
          if (ix < 0 || ix >= in.w) continue;
          const double* src = in.data.data() + in.index(iy, ix, 0);
          const double* wk = w + (ky * kernel_ + kx) * channels_;
          for (int c = 0; c < channels_; ++c) dst[c] += src[c] * wk[c];
        }
      }
    }
  }
  Observe(observer, *this, out);
  return out;
}

Tensor3 DepthwiseConv2d::Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  const int pad = (kernel_ - 1) / 2;
  Tensor3 grad_in(in.h, in.w, in.c);
  const double* w = weight_.value.data();
  double* gw = weight_.grad.data();
  for (int oy = 0; oy < out.h; ++oy) {
    for (int ox = 0; ox < out.w; ++ox) {
      const double* g = grad_out.data.data() + grad_out.index(oy, ox, 0);
      for (int c = 0; c < channels_; ++c) bias_.grad[c] += g[c];
      for (int ky = 0; ky < kernel_; ++ky) {
        const int iy = oy * stride_ + ky - pad;
        if (iy < 0 || iy >= in.h) continue;
        for (int kx = 0; kx < kernel_; ++kx) {
          const int ix = ox * stride_ + kx - pad;
          if (ix < 0 || ix >= in.w) continue;
          const double* src = in.data.data() + in.index(iy, ix, 0);
          double* gsrc = grad_in.data.data() + grad_in.index(iy, ix, 0);
          const int k = (ky * kernel_ + kx) * channels_;
          for (int c = 0; c < channels_; ++c) {
            gw[k + c] += g[c] * src[c];
            gsrc[c] += g[c] * w[k + c];
          }
        }
      }
    }
  }
  return grad_in;
}

PointwiseConv2d::PointwiseConv2d(std::string name, int in, int out)
    : Layer(name), in_(in), out_(out), weight_(name + ".weight", {in, out}), bias_(name + ".bias", {out}) {}

Tensor3 PointwiseConv2d::Forward(const Tensor3& in, const LayerObserver* observer) const {
  CheckChannels(*this, in, in_);
  Tensor3 out(in.h, in.w, out_);
  const Eigen::Index pixels = static_cast<Eigen::Index>(in.h) * in.w;
  MapR o(out.data.data(), pixels, out_);
  o.noalias() = CMapR(in.data.data(), pixels, in_) * CMapR(weight_.value.data(), in_, out_);
  o.rowwise() += CVec(bias_.value.data(), out_).transpose();
  Observe(observer, *this, out);
  return out;
}

Tensor3 PointwiseConv2d::Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  const Eigen::Index pixels = static_cast<Eigen::Index>(in.h) * in.w;
  CMapR x(in.data.data(), pixels, in_);
  CMapR g(grad_out.data.data(), pixels, out_);
  MapR(weight_.grad.data(), in_, out_).noalias() += x.transpose() * g;
  Eigen::Map<Eigen::VectorXd>(bias_.grad.data(), out_) += g.colwise().sum().transpose();
  Tensor3 grad_in(in.h, in.w, in.c);
  MapR(grad_in.data.data(), pixels, in_).noalias() = g * CMapR(weight_.value.data(), in_, out_).transpose();
  (void)out;
  return grad_in;
}

Tensor3 Relu6::Forward(const Tensor3& in, const LayerObserver* observer) const {
  Tensor3 out = in;
  for (double& v : out.data) v = std::clamp(v, 0.0, 6.0);
  Observe(observer, *this, out);
  return out;
}

Tensor3 Relu6::Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  Tensor3 grad_in = grad_out;
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    if (in.data[i] <= 0.0 || in.data[i] >= 6.0) grad_in.data[i] = 0.0;
  }
  (void)out;
  return grad_in;
}

Sequential::Sequential(const Sequential& other) : Layer(other.name()) {
  for (const auto& l : other.layers_) layers_.push_back(l->Clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Sequential::Add(std::unique_ptr<Layer> layer) {
  if (auto* seq = dynamic_cast<Sequential*>(layer.get())) {
    for (auto& l : seq->layers_) layers_.push_back(std::move(l));
    return;
  }
  layers_.push_back(std::move(layer));
}

Tensor3 Sequential::Forward(const Tensor3& in, const LayerObserver* observer) const {
  Tensor3 x = in;
  for (const auto& l : layers_) x = l->Forward(x, observer);
  return x;
}

std::vector<Tensor3> Sequential::ForwardTrace(const Tensor3& in) const {
  std::vector<Tensor3> trace;
  trace.reserve(layers_.size() + 1);
  trace.push_back(in);
  for (const auto& l : layers_) trace.push_back(l->Forward(trace.back()));
  return trace;
}

Tensor3 Sequential::BackwardTrace(const std::vector<Tensor3>& trace, const Tensor3& grad_out, bool input_grad) {
  Tensor3 g = grad_out;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i == 0 && !input_grad) {
      layers_[0]->BackwardParams(trace[0], trace[1], g);
      return Tensor3();
    }
    g = layers_[i]->Backward(trace[i], trace[i + 1], g);
  }
  return g;
}

Tensor3 Sequential::Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  (void)out;
  return BackwardTrace(ForwardTrace(in), grad_out);
}

std::vector<Param*> Sequential::params() {
  std::vector<Param*> out;
  for (auto& l : layers_) {
    for (Param* p : l->params()) out.push_back(p);
  }
  return out;
}

void Sequential::CollectWeighted(std::vector<Layer*>& out) {
  for (auto& l : layers_) l->CollectWeighted(out);
}

Residual::Residual(std::string name, Sequential body, bool skip)
    : Layer(std::move(name)), body_(std::move(body)), skip_(skip) {}

Tensor3 Residual::Forward(const Tensor3& in, const LayerObserver* observer) const {
  Tensor3 out = body_.Forward(in, observer);
  if (skip_) {
    if (!out.same_shape(in)) Fail(ErrorKind::kShape, "residual " + name() + " shape mismatch");
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += in.data[i];
  }
  return out;
}

Tensor3 Residual::Backward(const Tensor3& in, const Tensor3& out, const Tensor3& grad_out) {
  (void)out;
  Tensor3 g = body_.BackwardTrace(body_.ForwardTrace(in), grad_out);
  if (skip_) {
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += grad_out.data[i];
  }
  return g;
}

void HeInit(Layer& layer, Rng& rng) {
  std::vector<Layer*> weighted;
  layer.CollectWeighted(weighted);
  for (Layer* l : weighted) {
    auto ps = l->params();
    Param& w = *ps[0];
    std::int64_t fan_in = 1;
    for (std::size_t d = 0; d + 1 < w.shape.size(); ++d) fan_in *= w.shape[d];
    if (dynamic_cast<DepthwiseConv2d*>(l) != nullptr) fan_in = w.shape[0] * w.shape[1];
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (double& v : w.value) v = sd * rng.Normal();
    std::fill(ps[1]->value.begin(), ps[1]->value.end(), 0.0);
  }
}

}  // namespace vtlayout
