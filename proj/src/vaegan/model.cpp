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

#include "semaug/vaegan/model.hpp"

#include <array>

#include "json.hpp"
#include "semaug/checkpoint.hpp"

namespace semaug::vaegan {

using nlohmann::json;

void VaeGanConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("vaegan config: " + what); };
  if (latent_dim < 1) fail("latent_dim must be >= 1");
  if (image_shape.channels < 1 || image_shape.height < 8 || image_shape.width < 8) {
    fail("image_shape must have >= 1 channel and be at least 8x8");
  }
  if (base_channels < 1) fail("base_channels must be >= 1");
  if (!(beta_max >= 0.0)) fail("beta_max must be >= 0");
  if (!(lambda_p >= 0.0)) fail("lambda_p must be >= 0");
  if (!(adv_weight >= 0.0)) fail("adv_weight must be >= 0");
  if (!(lr_eg > 0.0) || !(lr_d > 0.0)) fail("learning rates must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (total_steps < 1) fail("total_steps must be >= 1");
}

std::string VaeGanConfig::to_json() const {
  json j{{"latent_dim", latent_dim},
         {"image_shape", {image_shape.channels, image_shape.height, image_shape.width}},
         {"base_channels", base_channels},
         {"beta_max", beta_max},
         {"lambda_p", lambda_p},
         {"adv_weight", adv_weight},
         {"lr_eg", lr_eg},
         {"lr_d", lr_d},
         {"adam_beta1", adam_beta1},
         {"adam_beta2", adam_beta2},
         {"batch_size", batch_size},
         {"total_steps", total_steps},
         {"seed", seed}};
  return j.dump();
}

VaeGanConfig VaeGanConfig::from_json(const std::string& text) {
  const auto j = json::parse(text);
  VaeGanConfig c;
  c.latent_dim = j.at("latent_dim").get<std::int64_t>();
  const auto shape = j.at("image_shape").get<std::array<std::int64_t, 3>>();
  c.image_shape = ImageShape{shape[0], shape[1], shape[2]};
  c.base_channels = j.at("base_channels").get<std::int64_t>();
  c.beta_max = j.at("beta_max").get<double>();
  c.lambda_p = j.at("lambda_p").get<double>();
  c.adv_weight = j.at("adv_weight").get<double>();
  c.lr_eg = j.at("lr_eg").get<double>();
  c.lr_d = j.at("lr_d").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.batch_size = j.at("batch_size").get<std::int64_t>();
  c.total_steps = j.at("total_steps").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

VaeGan::VaeGan(const VaeGanConfig& config) : config_(config) {
  config_.validate();
  // Module initializers draw from the global generator.
  torch::manual_seed(config_.seed);
  encoder_ = Encoder(config_);
  generator_ = Generator(config_);
  discriminator_ = Discriminator(config_);
  train(false);
}

void VaeGan::check_images(const torch::Tensor& x) const {
  const auto& s = config_.image_shape;
  if (x.dim() != 4 || x.size(1) != s.channels || x.size(2) != s.height || x.size(3) != s.width) {
    throw ValidationError("image batch shape mismatch: expected [B, " + s.to_string() + "]");
  }
}

GaussianCode VaeGan::encode(const torch::Tensor& x) const {
  check_images(x);
  torch::NoGradGuard no_grad;
  return encoder_.ptr()->forward(x.to(dtype()));
}

torch::Tensor VaeGan::decode(const torch::Tensor& z) const {
  if (z.dim() != 2 || z.size(1) != config_.latent_dim) {
    throw ValidationError("latent batch must be [B, " + std::to_string(config_.latent_dim) + "]");
  }
  torch::NoGradGuard no_grad;
  return generator_.ptr()->forward(z.to(dtype()));
}

torch::Tensor VaeGan::discriminate(const torch::Tensor& x) const {
  check_images(x);
  torch::NoGradGuard no_grad;
  return discriminator_.ptr()->forward(x.to(dtype()));
}

torch::Tensor VaeGan::reconstruct(const torch::Tensor& x) const {
  return decode(encode(x).mu);
}

void VaeGan::train(bool on) {
  encoder_->train(on);
  generator_->train(on);
  discriminator_->train(on);
}

void VaeGan::to(torch::Dtype dtype) {
  encoder_->to(dtype);
  generator_->to(dtype);
  discriminator_->to(dtype);
}

torch::Dtype VaeGan::dtype() const {
  return encoder_.ptr()->parameters().front().scalar_type();
}

void VaeGan::save(const std::filesystem::path& path) const {
  const std::array<checkpoint::Section, 3> sections{
      checkpoint::Section{"E", encoder_.ptr().get()},
      checkpoint::Section{"G", generator_.ptr().get()},
      checkpoint::Section{"D", discriminator_.ptr().get()}};
  checkpoint::save(path, checkpoint::Header{"vaegan", config_.to_json(), step_}, sections);
}

VaeGan VaeGan::load(const std::filesystem::path& path) {
  const auto header = checkpoint::read_header(path);
  if (header.kind != "vaegan") {
    throw RuntimeFailure("'" + path.string() + "' is a " + header.kind + " checkpoint");
  }
  VaeGan model(VaeGanConfig::from_json(header.config_json));
  const std::array<checkpoint::Section, 3> sections{
      checkpoint::Section{"E", model.encoder_.ptr().get()},
      checkpoint::Section{"G", model.generator_.ptr().get()},
      checkpoint::Section{"D", model.discriminator_.ptr().get()}};
  checkpoint::load_into(path, sections);
  model.step_ = header.step;
  return model;
}

std::shared_ptr<FeatureExtractor> default_features(const VaeGanConfig& config,
                                                   torch::Dtype dtype) {
  return std::make_shared<PyramidFeatures>(config.image_shape.channels,
                                           derive_seed(config.seed, 0x9e7), 16, dtype);
}

double reconstruction_l1(const VaeGan& model, const torch::Tensor& probe) {
  const auto x = probe.to(model.dtype());
  return (x - model.reconstruct(x)).abs().mean().item<double>();
}

}  // namespace semaug::vaegan
