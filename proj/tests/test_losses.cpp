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

#include "doctest_torch.hpp"
#include "oracles.hpp"
#include "semaug/vaegan/losses.hpp"

using namespace semaug;
using namespace semaug::vaegan;

namespace {

torch::TensorOptions f64() { return torch::TensorOptions().dtype(torch::kFloat64); }

}  // namespace

TEST_SUITE("losses") {
  TEST_CASE("kld: standard normal code gives zero") {
    GaussianCode code{torch::zeros({3, 4}, f64()), torch::zeros({3, 4}, f64())};
    CHECK(kld_loss(code).item<double>() == 0.0);
  }

  TEST_CASE("kld matches the scalar oracle on random codes") {
    auto gen = at::make_generator<at::CPUGeneratorImpl>(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto mu = torch::randn({5, 6}, gen, f64()) * 2.0;
      const auto lv = torch::randn({5, 6}, gen, f64());
      const auto got = kld_loss({mu, lv}).item<double>();
      const auto* pm = mu.data_ptr<double>();
      const auto* pl = lv.data_ptr<double>();
      const double want = oracle::kld_scalar({pm, pm + 30}, {pl, pl + 30});
      CHECK(oracle::rel_error(got, want) <= 1e-12);
    }
  }

  TEST_CASE("kld gradients have the closed form mu/n and (exp(lv)-1)/(2n)") {
    auto mu = torch::tensor({{0.3, -1.2}, {2.0, 0.0}}, f64()).requires_grad_(true);
    auto lv = torch::tensor({{0.1, -0.5}, {1.5, 0.0}}, f64()).requires_grad_(true);
    kld_loss({mu, lv}).backward();
    const double n = 4.0;
    CHECK(torch::allclose(mu.grad(), mu.detach() / n, 0.0, 1e-15));
    CHECK(torch::allclose(lv.grad(), (lv.detach().exp() - 1.0) / (2.0 * n), 0.0, 1e-15));
  }

  TEST_CASE("recon loss matches the scalar oracle") {
    oracle::TanhSquareFeatures features;
    auto gen = at::make_generator<at::CPUGeneratorImpl>(3);
    for (double lambda : {0.0, 0.5, 1.0, 3.0}) {
      const auto x = torch::rand({2, 3, 4, 4}, gen, f64()) * 2 - 1;
      const auto y = torch::rand({2, 3, 4, 4}, gen, f64()) * 2 - 1;
      CHECK(oracle::rel_error(recon_loss(x, y, features, lambda).item<double>(),
                              oracle::recon_scalar(x, y, lambda)) <= 1e-12);
    }
  }

  TEST_CASE("recon loss is zero for identical images and rejects shape mismatch") {
    oracle::TanhSquareFeatures features;
    const auto x = torch::rand({2, 3, 4, 4}, f64());
    CHECK(recon_loss(x, x, features, 1.0).item<double>() == 0.0);
    CHECK_THROWS_AS(recon_loss(x, torch::rand({2, 3, 4, 5}, f64()), features, 1.0), ValidationError);
  }

  TEST_CASE("hinge losses on hand-evaluated cases") {
    const auto real = torch::tensor({2.0, 0.5, -1.0}, f64());
    const auto fake = torch::tensor({-2.0, 0.0, 1.0}, f64());
    // relu(1-real) = [0, 0.5, 2] -> 2.5/3; relu(1+fake) = [0, 1, 2] -> 1.
    CHECK(hinge_d_loss(real, fake).item<double>() == doctest::Approx(2.5 / 3.0 + 1.0).epsilon(1e-15));
    CHECK(hinge_d_loss(torch::tensor({1.0, 3.0}, f64()), torch::tensor({-1.0, -4.0}, f64())).item<double>() == 0.0);
    CHECK(hinge_g_loss(fake).item<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(hinge_g_loss(torch::tensor({4.0}, f64())).item<double>() == -4.0);
    CHECK_THROWS_AS(hinge_d_loss(torch::empty({0}, f64()), fake), ValidationError);
    CHECK_THROWS_AS(hinge_g_loss(torch::empty({0}, f64())), ValidationError);
  }

  TEST_CASE("hinge gradients away from the kink") {
    auto real = torch::tensor({0.5, 2.0}, f64()).requires_grad_(true);
    auto fake = torch::tensor({-0.5, -3.0}, f64()).requires_grad_(true);
    hinge_d_loss(real, fake).backward();
    CHECK(torch::equal(real.grad(), torch::tensor({-0.5, 0.0}, f64())));
    CHECK(torch::equal(fake.grad(), torch::tensor({0.5, 0.0}, f64())));
  }

  TEST_CASE("kl_weight anneals linearly to beta_max") {
    CHECK(kl_weight(0, 2000, 1.0) == 0.0);
    CHECK(kl_weight(1000, 2000, 1.0) == 0.5);
    CHECK(kl_weight(2000, 2000, 0.7) == 0.7);
    double prev = -1.0;
    for (int s = 0; s <= 97; ++s) {
      const double w = kl_weight(s, 97, 0.3);
      CHECK(w >= prev);
      prev = w;
    }
    CHECK_THROWS_AS(kl_weight(-1, 10, 1.0), ValidationError);
    CHECK_THROWS_AS(kl_weight(11, 10, 1.0), ValidationError);
  }

  TEST_CASE("reparameterize uses the standard deviation, not the variance") {
    const auto mu = torch::tensor({{1.0, -2.0}}, f64());
    const auto lv = torch::tensor({{std::log(4.0), std::log(9.0)}}, f64());
    const auto z = reparameterize_with({mu, lv}, torch::ones({1, 2}, f64()));
    CHECK(z[0][0].item<double>() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(z[0][1].item<double>() == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("reparameterize is deterministic per generator seed") {
    GaussianCode code{torch::zeros({4, 3}), torch::zeros({4, 3})};
    auto g1 = at::make_generator<at::CPUGeneratorImpl>(5);
    auto g2 = at::make_generator<at::CPUGeneratorImpl>(5);
    CHECK(torch::equal(reparameterize(code, g1), reparameterize(code, g2)));
  }
}
