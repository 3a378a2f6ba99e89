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

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "semaug/vaegan/losses.hpp"
#include "semaug/vaegan/model.hpp"

namespace semaug::vaegan {

namespace {

std::string describe(const LossRecord& r) {
  std::ostringstream out;
  out << "step=" << r.step << " d_loss=" << r.d_loss << " g_adv_loss=" << r.g_adv_loss
      << " recon_l1=" << r.recon_l1 << " recon_perc=" << r.recon_perc << " kld=" << r.kld
      << " kl_weight=" << r.kl_weight;
  return out.str();
}

bool finite(const LossRecord& r) {
  return std::isfinite(r.d_loss) && std::isfinite(r.g_adv_loss) && std::isfinite(r.recon_l1) &&
         std::isfinite(r.recon_perc) && std::isfinite(r.kld);
}

void set_requires_grad(torch::nn::Module& module, bool on) {
  for (auto& p : module.parameters()) p.set_requires_grad(on);
}

}  // namespace

NonFiniteLossError::NonFiniteLossError(const std::string& stage, const LossRecord& record)
    : RuntimeFailure("non-finite loss in " + stage + " (" + describe(record) + ")"),
      record_(record) {}

TrainedVaeGan train_vaegan(const data::DatasetManifest& manifest, const VaeGanConfig& config,
                           std::shared_ptr<const FeatureExtractor> features,
                           const StepCallback& on_step) {
  config.validate();
  if (manifest.empty()) throw ValidationError("train_vaegan: manifest is empty");
  if (!(manifest.image_shape() == config.image_shape)) {
    throw ValidationError("train_vaegan: manifest images are " +
                          manifest.image_shape().to_string() + " but the config expects " +
                          config.image_shape.to_string());
  }

  TrainedVaeGan result{VaeGan(config), {}};
  auto& model = result.model;
  if (!features) features = default_features(config);
  auto& encoder = model.encoder();
  auto& generator = model.generator();
  auto& discriminator = model.discriminator();

  std::vector<torch::Tensor> eg_params = encoder->parameters();
  for (auto& p : generator->parameters()) eg_params.push_back(p);
  const auto betas = std::make_tuple(config.adam_beta1, config.adam_beta2);
  torch::optim::Adam opt_eg(eg_params, torch::optim::AdamOptions(config.lr_eg).betas(betas));
  torch::optim::Adam opt_d(discriminator->parameters(),
                           torch::optim::AdamOptions(config.lr_d).betas(betas));

  Rng batch_rng(derive_seed(config.seed, 1));
  auto noise = at::make_generator<at::CPUGeneratorImpl>(derive_seed(config.seed, 2));
  std::uniform_int_distribution<std::size_t> pick(0, manifest.size() - 1);
  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<std::size_t> idx(batch);

  model.train(true);
  result.log.reserve(static_cast<std::size_t>(config.total_steps));
  for (std::int64_t step = 0; step < config.total_steps; ++step) {
    for (auto& i : idx) i = pick(batch_rng);
    const auto x = manifest.stack(idx);
    LossRecord rec;
    rec.step = step;
    rec.kl_weight = kl_weight(step, config.total_steps, config.beta_max);

    // Discriminator step: real x versus the current reconstructions.
    torch::Tensor fake;
    {
      torch::NoGradGuard no_grad;
      fake = generator->forward(reparameterize(encoder->forward(x), noise));
    }
    const auto scores = discriminator->forward(torch::cat({x, fake}));
    const auto d_loss = hinge_d_loss(scores.narrow(0, 0, x.size(0)),
                                     scores.narrow(0, x.size(0), fake.size(0)));
    rec.d_loss = d_loss.item<double>();
    if (!std::isfinite(rec.d_loss)) throw NonFiniteLossError("discriminator step", rec);
    opt_d.zero_grad();
    d_loss.backward();
    opt_d.step();

    // Encoder + generator step.
    set_requires_grad(*discriminator, false);
    const auto code = encoder->forward(x);
    const auto x_prime = generator->forward(reparameterize(code, noise));
    const auto recon = recon_terms(x, x_prime, *features, config.lambda_p);
    const auto kld = kld_loss(code);
    const auto g_adv = hinge_g_loss(discriminator->forward(x_prime));
    const auto loss = recon.total + rec.kl_weight * kld + config.adv_weight * g_adv;
    rec.g_adv_loss = g_adv.item<double>();
    rec.recon_l1 = recon.pixel.item<double>();
    rec.recon_perc = recon.perceptual.item<double>();
    rec.kld = kld.item<double>();
    if (!finite(rec) || !std::isfinite(loss.item<double>())) {
      throw NonFiniteLossError("encoder/generator step", rec);
    }
    opt_eg.zero_grad();
    loss.backward();
    opt_eg.step();
    set_requires_grad(*discriminator, true);

    model.set_step(step + 1);
    result.log.push_back(rec);
    if (on_step) on_step(rec);
  }
  model.train(false);
  return result;
}

void write_loss_log(const std::vector<LossRecord>& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write loss log '" + path.string() + "'");
  out << "step,d_loss,g_adv_loss,recon_l1,recon_perc,kld,kl_weight\n";
  out << std::setprecision(10);
  for (const auto& r : log) {
    out << r.step << ',' << r.d_loss << ',' << r.g_adv_loss << ',' << r.recon_l1 << ','
        << r.recon_perc << ',' << r.kld << ',' << r.kl_weight << '\n';
  }
}

std::vector<LossRecord> read_loss_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("cannot read loss log '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<LossRecord> log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    LossRecord r;
    char comma = 0;
    row >> r.step >> comma >> r.d_loss >> comma >> r.g_adv_loss >> comma >> r.recon_l1 >>
        comma >> r.recon_perc >> comma >> r.kld >> comma >> r.kl_weight;
    if (!row) throw RuntimeFailure("malformed loss log row: " + line);
    log.push_back(r);
  }
  return log;
}

}  // namespace semaug::vaegan
