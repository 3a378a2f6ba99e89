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

#pragma once

#include <cstdint>

#include <torch/torch.h>

#include "semaug/common.hpp"
#include "semaug/vaegan/config.hpp"

namespace semaug::vaegan {

// ---------------------------------------------------------------------------
// Spectrally normalized layers (discriminator only). One power-iteration
// step refreshes the singular-vector estimate on each forward pass in
// training mode; in eval mode the stored estimate is reused, which makes
// the forward a fixed differentiable function of the weights.
// ---------------------------------------------------------------------------

class SNConv2dImpl : public torch::nn::Module {
 public:
  SNConv2dImpl(std::int64_t in, std::int64_t out, std::int64_t kernel, std::int64_t padding);
  torch::Tensor forward(const torch::Tensor& x);
  torch::Tensor normalized_weight();

 private:
  torch::Tensor weight_, bias_, u_;
  std::int64_t padding_;
};
TORCH_MODULE(SNConv2d);

class SNLinearImpl : public torch::nn::Module {
 public:
  SNLinearImpl(std::int64_t in, std::int64_t out);
  torch::Tensor forward(const torch::Tensor& x);
  torch::Tensor normalized_weight();

 private:
  torch::Tensor weight_, bias_, u_;
};
TORCH_MODULE(SNLinear);

/// Residual block that halves spatial size with a pooled 1x1 shortcut.
/// With `pool_first` both 3x3 convs run at the reduced resolution;
/// otherwise the first conv sees the full-resolution input (used where the
/// input is the raw image and has few channels).
class DownBlockImpl : public torch::nn::Module {
 public:
  DownBlockImpl(std::int64_t in, std::int64_t out, bool spectral_norm, bool pool_first);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  bool spectral_norm_;
  bool pool_first_;
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr}, skip_{nullptr};
  SNConv2d sn1_{nullptr}, sn2_{nullptr}, sn_skip_{nullptr};
};
TORCH_MODULE(DownBlock);

/// Residual block that doubles spatial size with nearest upsampling; the
/// first conv runs before the upsample, the second after it.
class UpBlockImpl : public torch::nn::Module {
 public:
  UpBlockImpl(std::int64_t in, std::int64_t out);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr}, skip_{nullptr};
};
TORCH_MODULE(UpBlock);

/// Residual encoder: image -> (mu, log_var). log_var is floored at
/// log(1e-8) so every emitted variance is at least 1e-8.
class EncoderImpl : public torch::nn::Module {
 public:
  explicit EncoderImpl(const VaeGanConfig& config);
  GaussianCode forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d stem_{nullptr};
  DownBlock b1_{nullptr}, b2_{nullptr}, b3_{nullptr};
  torch::nn::Linear head_{nullptr};
  std::int64_t latent_dim_;
};
TORCH_MODULE(Encoder);

/// Decoder / generator: latent -> image in [-1, 1] (tanh output).
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(const VaeGanConfig& config);
  torch::Tensor forward(const torch::Tensor& z);

 private:
  torch::nn::Linear project_{nullptr};
  UpBlock b1_{nullptr}, b2_{nullptr}, b3_{nullptr};
  torch::nn::Conv2d to_image_{nullptr};
  std::int64_t channels_, seed_h_, seed_w_;
  ImageShape shape_;
};
TORCH_MODULE(Generator);

/// Spectrally normalized residual critic: image -> unbounded score [B].
class DiscriminatorImpl : public torch::nn::Module {
 public:
  explicit DiscriminatorImpl(const VaeGanConfig& config);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  DownBlock b1_{nullptr}, b2_{nullptr}, b3_{nullptr};
  SNLinear head_{nullptr};
};
TORCH_MODULE(Discriminator);

}  // namespace semaug::vaegan
