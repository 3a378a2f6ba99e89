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

#include "semaug/vaegan/losses.hpp"

#include "semaug/vaegan/perceptual.hpp"

namespace semaug::vaegan {

namespace {

void require_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (a.sizes() != b.sizes()) {
    throw ValidationError(std::string(what) + ": shape mismatch");
  }
}

void require_nonempty(const torch::Tensor& t, const char* what) {
  if (!t.defined() || t.numel() == 0) {
    throw ValidationError(std::string(what) + ": empty score batch");
  }
}

}  // namespace

torch::Tensor kld_loss(const GaussianCode& code) {
  require_same_shape(code.mu, code.log_var, "kld_loss");
  return (0.5 * (code.mu.square() + code.log_var.exp() - code.log_var - 1.0)).mean();
}

torch::Tensor pixel_l1(const torch::Tensor& x, const torch::Tensor& x_prime) {
  require_same_shape(x, x_prime, "recon_loss");
  return (x - x_prime).abs().mean();
}

torch::Tensor perceptual_l1(const torch::Tensor& x, const torch::Tensor& x_prime,
                            const FeatureExtractor& features) {
  require_same_shape(x, x_prime, "recon_loss");
  return (features.features(x) - features.features(x_prime)).abs().mean();
}

ReconTerms recon_terms(const torch::Tensor& x, const torch::Tensor& x_prime,
                       const FeatureExtractor& features, double lambda_p) {
  ReconTerms terms;
  terms.pixel = pixel_l1(x, x_prime);
  if (lambda_p == 0.0) {
    terms.perceptual = torch::zeros({}, terms.pixel.options());
    terms.total = terms.pixel;
  } else {
    terms.perceptual = perceptual_l1(x, x_prime, features);
    terms.total = terms.pixel + lambda_p * terms.perceptual;
  }
  return terms;
}

torch::Tensor recon_loss(const torch::Tensor& x, const torch::Tensor& x_prime,
                         const FeatureExtractor& features, double lambda_p) {
  return recon_terms(x, x_prime, features, lambda_p).total;
}

torch::Tensor hinge_d_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores) {
  require_nonempty(real_scores, "hinge_d_loss");
  require_nonempty(fake_scores, "hinge_d_loss");
  return torch::relu(1.0 - real_scores).mean() + torch::relu(1.0 + fake_scores).mean();
}

torch::Tensor hinge_g_loss(const torch::Tensor& fake_scores) {
  require_nonempty(fake_scores, "hinge_g_loss");
  return -fake_scores.mean();
}

double kl_weight(std::int64_t step, std::int64_t total_steps, double beta_max) {
  if (total_steps < 1 || step < 0 || step > total_steps) {
    throw ValidationError("kl_weight: step must lie in [0, total_steps]");
  }
  if (step == total_steps) return beta_max;
  return beta_max * static_cast<double>(step) / static_cast<double>(total_steps);
}

torch::Tensor reparameterize_with(const GaussianCode& code, const torch::Tensor& noise) {
  require_same_shape(code.mu, code.log_var, "reparameterize");
  require_same_shape(code.mu, noise, "reparameterize");
  return torch::exp(0.5 * code.log_var) * noise + code.mu;
}

torch::Tensor reparameterize(const GaussianCode& code, at::Generator& generator) {
  auto noise = torch::randn(code.mu.sizes(), generator, code.mu.options());
  return reparameterize_with(code, noise);
}

}  // namespace semaug::vaegan
