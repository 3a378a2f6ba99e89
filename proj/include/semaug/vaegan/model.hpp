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
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "semaug/data.hpp"
#include "semaug/vaegan/config.hpp"
#include "semaug/vaegan/networks.hpp"
#include "semaug/vaegan/perceptual.hpp"

namespace semaug::vaegan {

/// Encoder E, generator/decoder G and discriminator D with the config that
/// built them. Inference methods run without autograd in eval mode and are
/// safe to call concurrently once training has finished.
class VaeGan {
 public:
  explicit VaeGan(const VaeGanConfig& config);

  const VaeGanConfig& config() const { return config_; }
  std::int64_t step() const { return step_; }
  void set_step(std::int64_t step) { step_ = step; }

  /// x: [B, C, H, W] matching config.image_shape.
  GaussianCode encode(const torch::Tensor& x) const;
  /// z: [B, d]. Output: [B, C, H, W] in [-1, 1].
  torch::Tensor decode(const torch::Tensor& z) const;
  /// Output: [B] raw critic scores.
  torch::Tensor discriminate(const torch::Tensor& x) const;

  /// decode(encode(x).mu): the deterministic reconstruction.
  torch::Tensor reconstruct(const torch::Tensor& x) const;

  Encoder& encoder() { return encoder_; }
  Generator& generator() { return generator_; }
  Discriminator& discriminator() { return discriminator_; }

  void train(bool on);
  void to(torch::Dtype dtype);
  torch::Dtype dtype() const;

  void save(const std::filesystem::path& path) const;
  static VaeGan load(const std::filesystem::path& path);

 private:
  void check_images(const torch::Tensor& x) const;

  VaeGanConfig config_;
  std::int64_t step_ = 0;
  Encoder encoder_{nullptr};
  Generator generator_{nullptr};
  Discriminator discriminator_{nullptr};
};

/// The default perceptual extractor tied to a config (seeded from it).
std::shared_ptr<FeatureExtractor> default_features(const VaeGanConfig& config,
                                                   torch::Dtype dtype = torch::kFloat32);

/// One row of the training loss log.
struct LossRecord {
  std::int64_t step = 0;
  double d_loss = 0.0;
  double g_adv_loss = 0.0;
  double recon_l1 = 0.0;
  double recon_perc = 0.0;
  double kld = 0.0;
  double kl_weight = 0.0;
};

/// Thrown when any loss term turns non-finite; carries the offending record.
class NonFiniteLossError : public RuntimeFailure {
 public:
  NonFiniteLossError(const std::string& stage, const LossRecord& record);
  const LossRecord& record() const { return record_; }

 private:
  LossRecord record_;
};

struct TrainedVaeGan {
  VaeGan model;
  std::vector<LossRecord> log;
};

using StepCallback = std::function<void(const LossRecord&)>;

/// Alternating hinge-GAN training: a D step on real x versus
/// x' = decode(reparameterize(encode(x))), then an E+G step on
/// recon + kl_weight(step) * kld + adv_weight * hinge_g. Minibatches are
/// drawn uniformly from the manifest.
TrainedVaeGan train_vaegan(const data::DatasetManifest& manifest, const VaeGanConfig& config,
                           std::shared_ptr<const FeatureExtractor> features = nullptr,
                           const StepCallback& on_step = {});

/// CSV with header step,d_loss,g_adv_loss,recon_l1,recon_perc,kld,kl_weight.
void write_loss_log(const std::vector<LossRecord>& log, const std::filesystem::path& path);
std::vector<LossRecord> read_loss_log(const std::filesystem::path& path);

/// Mean |x - reconstruct(x)| over a probe batch.
double reconstruction_l1(const VaeGan& model, const torch::Tensor& probe);

}  // namespace semaug::vaegan
