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
#include <string>

#include <torch/torch.h>

#include "semaug/common.hpp"

namespace semaug::vaegan {

/// Per-sample latent Gaussian. Rows of `mu` and `log_var` are [B, d];
/// the variance is exp(log_var), so it is positive by construction.
struct GaussianCode {
  torch::Tensor mu;
  torch::Tensor log_var;

  std::int64_t batch() const { return mu.size(0); }
  std::int64_t dim() const { return mu.size(1); }
  torch::Tensor variance() const { return log_var.exp(); }
};

struct VaeGanConfig {
  std::int64_t latent_dim = 64;
  ImageShape image_shape{3, 32, 32};
  // Width of the first conv stage; later stages use 2x and 4x.
  std::int64_t base_channels = 32;
  double beta_max = 1.0;
  double lambda_p = 1.0;
  // Multiplier on the generator's hinge term inside the E+G objective.
  double adv_weight = 1.0;
  double lr_eg = 1e-3;
  double lr_d = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  std::int64_t batch_size = 32;
  std::int64_t total_steps = 2000;
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the first invalid field.
  void validate() const;
  std::string to_json() const;
  static VaeGanConfig from_json(const std::string& text);
};

}  // namespace semaug::vaegan
