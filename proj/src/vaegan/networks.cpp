// Copyright 2026 The semaug Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semaug/vaegan/networks.hpp"

#include <cmath>

namespace semaug::vaegan {

namespace F = torch::nn::functional;

namespace {

torch::Tensor l2_normalize(const torch::Tensor& v) {
  return v / (v.norm() + 1e-12);
}

// W / sigma_max(W), with sigma from one power-iteration step on `u`.
torch::Tensor spectral_normalize(const torch::Tensor& weight, torch::Tensor& u, bool update) {
  const auto w = weight.reshape({weight.size(0), -1});
  torch::Tensor v;
  {
    torch::NoGradGuard no_grad;
    auto uu = u;
    if (update) {
      v = l2_normalize(torch::mv(w.t(), uu));
      uu = l2_normalize(torch::mv(w, v));
      u.copy_(uu);
    }
    v = l2_normalize(torch::mv(w.t(), u));
  }
  const auto sigma = torch::dot(u, torch::mv(w, v));
  return weight / sigma;
}

}  // namespace

SNConv2dImpl::SNConv2dImpl(std::int64_t in, std::int64_t out, std::int64_t kernel,
                           std::int64_t padding)
    : padding_(padding) {
  torch::nn::Conv2d init(torch::nn::Conv2dOptions(in, out, kernel).padding(padding));
  weight_ = register_parameter("weight", init->weight.detach().clone());
  bias_ = register_parameter("bias", init->bias.detach().clone());
  u_ = register_buffer("u", l2_normalize(torch::randn({out})));
}

torch::Tensor SNConv2dImpl::normalized_weight() {
  return spectral_normalize(weight_, u_, is_training());
}

torch::Tensor SNConv2dImpl::forward(const torch::Tensor& x) {
  return torch::conv2d(x, normalized_weight(), bias_, /*stride=*/1, padding_);
}

SNLinearImpl::SNLinearImpl(std::int64_t in, std::int64_t out) {
  torch::nn::Linear init(in, out);
  weight_ = register_parameter("weight", init->weight.detach().clone());
  bias_ = register_parameter("bias", init->bias.detach().clone());
  u_ = register_buffer("u", l2_normalize(torch::randn({out})));
}

torch::Tensor SNLinearImpl::normalized_weight() {
  return spectral_normalize(weight_, u_, is_training());
}

torch::Tensor SNLinearImpl::forward(const torch::Tensor& x) {
  return torch::linear(x, normalized_weight(), bias_);
}

DownBlockImpl::DownBlockImpl(std::int64_t in, std::int64_t out, bool spectral_norm,
                             bool pool_first)
    : spectral_norm_(spectral_norm), pool_first_(pool_first) {
  if (spectral_norm_) {
    sn1_ = register_module("conv1", SNConv2d(in, out, 3, 1));
    sn2_ = register_module("conv2", SNConv2d(out, out, 3, 1));
    sn_skip_ = register_module("skip", SNConv2d(in, out, 1, 0));
  } else {
    conv1_ = register_module("conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).padding(1)));
    conv2_ = register_module("conv2", torch::nn::Conv2d(torch::nn::Conv2dOptions(out, out, 3).padding(1)));
    skip_ = register_module("skip", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 1)));
  }
}

torch::Tensor DownBlockImpl::forward(const torch::Tensor& x) {
  const auto pooled = torch::avg_pool2d(x, 2);
  torch::Tensor h;
  if (pool_first_) {
    h = torch::relu(pooled);
    h = spectral_norm_ ? sn1_(h) : conv1_(h);
  } else {
    h = spectral_norm_ ? sn1_(x) : conv1_(x);
    h = torch::avg_pool2d(h, 2);
  }
  h = torch::relu(h);
  h = spectral_norm_ ? sn2_(h) : conv2_(h);
  return h + (spectral_norm_ ? sn_skip_(pooled) : skip_(pooled));
}

UpBlockImpl::UpBlockImpl(std::int64_t in, std::int64_t out) {
  conv1_ = register_module("conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).padding(1)));
  conv2_ = register_module("conv2", torch::nn::Conv2d(torch::nn::Conv2dOptions(out, out, 3).padding(1)));
  skip_ = register_module("skip", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 1)));
}

torch::Tensor UpBlockImpl::forward(const torch::Tensor& x) {
  const auto up = [](const torch::Tensor& t) {
    return F::interpolate(t, F::InterpolateFuncOptions()
                                 .scale_factor(std::vector<double>{2.0, 2.0})
                                 .mode(torch::kNearest));
  };
  auto h = up(conv1_(torch::relu(x)));
  h = conv2_(torch::relu(h));
  return h + skip_(up(x));
}

namespace {

std::int64_t down3(std::int64_t n) { return ((n / 2) / 2) / 2; }
std::int64_t up3_seed(std::int64_t n) { return (n + 7) / 8; }

}  // namespace

EncoderImpl::EncoderImpl(const VaeGanConfig& config) : latent_dim_(config.latent_dim) {
  const auto ch = config.base_channels;
  const auto& s = config.image_shape;
  if (down3(s.height) < 1 || down3(s.width) < 1) {
    throw ValidationError("image_shape must be at least 8x8");
  }
  stem_ = register_module(
      "stem", torch::nn::Conv2d(torch::nn::Conv2dOptions(s.channels, ch, 3).padding(1)));
  b1_ = register_module("b1", DownBlock(ch, 2 * ch, false, true));
  b2_ = register_module("b2", DownBlock(2 * ch, 4 * ch, false, true));
  b3_ = register_module("b3", DownBlock(4 * ch, 4 * ch, false, true));
  head_ = register_module(
      "head", torch::nn::Linear(4 * ch * down3(s.height) * down3(s.width), 2 * latent_dim_));
}

GaussianCode EncoderImpl::forward(const torch::Tensor& x) {
  auto h = b3_(b2_(b1_(stem_(x))));
  h = torch::relu(h).flatten(1);
  auto out = head_(h);
  static const double kLogVarFloor = std::log(1e-8);
  return GaussianCode{out.narrow(1, 0, latent_dim_),
                      out.narrow(1, latent_dim_, latent_dim_).clamp_min(kLogVarFloor)};
}

GeneratorImpl::GeneratorImpl(const VaeGanConfig& config)
    : channels_(4 * config.base_channels),
      seed_h_(up3_seed(config.image_shape.height)),
      seed_w_(up3_seed(config.image_shape.width)),
      shape_(config.image_shape) {
  const auto ch = config.base_channels;
  project_ = register_module(
      "project", torch::nn::Linear(config.latent_dim, channels_ * seed_h_ * seed_w_));
  b1_ = register_module("b1", UpBlock(4 * ch, 4 * ch));
  b2_ = register_module("b2", UpBlock(4 * ch, 2 * ch));
  b3_ = register_module("b3", UpBlock(2 * ch, ch));
  to_image_ = register_module(
      "to_image", torch::nn::Conv2d(torch::nn::Conv2dOptions(ch, shape_.channels, 3).padding(1)));
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& z) {
  auto h = project_(z).view({z.size(0), channels_, seed_h_, seed_w_});
  h = b3_(b2_(b1_(h)));
  h = torch::tanh(to_image_(torch::relu(h)));
  // Crop when the 8x seed grid overshoots the target size.
  if (h.size(2) != shape_.height) h = h.narrow(2, (h.size(2) - shape_.height) / 2, shape_.height);
  if (h.size(3) != shape_.width) h = h.narrow(3, (h.size(3) - shape_.width) / 2, shape_.width);
  return h;
}

DiscriminatorImpl::DiscriminatorImpl(const VaeGanConfig& config) {
  const auto ch = config.base_channels;
  b1_ = register_module("b1", DownBlock(config.image_shape.channels, ch, true, false));
  b2_ = register_module("b2", DownBlock(ch, 2 * ch, true, true));
  b3_ = register_module("b3", DownBlock(2 * ch, 4 * ch, true, true));
  head_ = register_module("head", SNLinear(4 * ch, 1));
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& x) {
  auto h = torch::relu(b3_(b2_(b1_(x))));
  h = h.sum({2, 3});
  return head_(h).squeeze(1);
}

}  // namespace semaug::vaegan
