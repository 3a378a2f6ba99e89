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

#include "semaug/vaegan/config.hpp"

namespace semaug::vaegan {

class FeatureExtractor;

/// Mean over batch and latent dimensions of
/// 0.5 * (mu^2 + var - log var - 1), var = exp(log_var).
torch::Tensor kld_loss(const GaussianCode& code);

/// Mean absolute pixel difference.
torch::Tensor pixel_l1(const torch::Tensor& x, const torch::Tensor& x_prime);

/// Mean absolute difference of P's features.
torch::Tensor perceptual_l1(const torch::Tensor& x, const torch::Tensor& x_prime,
                            const FeatureExtractor& features);

struct ReconTerms {
  torch::Tensor pixel;
  torch::Tensor perceptual;
  torch::Tensor total;
};

/// pixel_l1 + lambda_p * perceptual_l1, with the parts kept for logging.
/// The feature pass is skipped entirely when lambda_p is 0.
ReconTerms recon_terms(const torch::Tensor& x, const torch::Tensor& x_prime,
                       const FeatureExtractor& features, double lambda_p);

torch::Tensor recon_loss(const torch::Tensor& x, const torch::Tensor& x_prime,
                         const FeatureExtractor& features, double lambda_p);

/// mean(max(0, 1 - real)) + mean(max(0, 1 + fake)).
torch::Tensor hinge_d_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores);

/// -mean(fake).
torch::Tensor hinge_g_loss(const torch::Tensor& fake_scores);

/// Linear KL-weight ramp: beta_max * step / total_steps.
double kl_weight(std::int64_t step, std::int64_t total_steps, double beta_max);

/// z = exp(log_var / 2) * r + mu, r ~ N(0, I) drawn from `generator`.
/// A log_var of -inf yields z == mu exactly.
torch::Tensor reparameterize(const GaussianCode& code, at::Generator& generator);

/// Reparameterization with caller-supplied standard-normal noise.
torch::Tensor reparameterize_with(const GaussianCode& code, const torch::Tensor& noise);

}  // namespace semaug::vaegan
