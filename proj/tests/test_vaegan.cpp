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

#include "doctest_torch.hpp"
#include "semaug/data.hpp"
#include "semaug/vaegan/model.hpp"
#include "test_util.hpp"

using namespace semaug;

namespace {

vaegan::VaeGanConfig tiny_config() {
  vaegan::VaeGanConfig c;
  c.latent_dim = 8;
  c.image_shape = ImageShape{3, 16, 16};
  c.base_channels = 4;
  c.batch_size = 8;
  c.total_steps = 6;
  c.seed = 4;
  return c;
}

data::DatasetManifest tiny_data() {
  return data::make_longtail_synthetic({3, 12, 4, 0.5, {3, 16, 16}, 2, "v"});
}

}  // namespace

TEST_SUITE("vaegan") {
  TEST_CASE("shapes: encode, decode, discriminate") {
    const vaegan::VaeGan model(tiny_config());
    const auto x = torch::rand({5, 3, 16, 16}) * 2 - 1;
    const auto code = model.encode(x);
    CHECK(code.mu.sizes() == torch::IntArrayRef({5, 8}));
    CHECK(code.log_var.sizes() == torch::IntArrayRef({5, 8}));
    CHECK((code.variance() > 0).all().item<bool>());
    const auto y = model.decode(code.mu);
    CHECK(y.sizes() == x.sizes());
    CHECK(y.abs().max().item<float>() <= 1.0f);
    CHECK(model.discriminate(x).sizes() == torch::IntArrayRef({5}));
    CHECK_THROWS_AS(model.encode(torch::zeros({1, 3, 8, 8})), ValidationError);
  }

  TEST_CASE("odd image sizes are cropped to the configured shape") {
    auto c = tiny_config();
    c.image_shape = ImageShape{1, 12, 20};
    const vaegan::VaeGan model(c);
    CHECK(model.decode(torch::zeros({2, 8})).sizes() == torch::IntArrayRef({2, 1, 12, 20}));
  }

  TEST_CASE("config validation") {
    auto c = tiny_config();
    c.latent_dim = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = tiny_config();
    c.beta_max = -1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = tiny_config();
    CHECK(vaegan::VaeGanConfig::from_json(c.to_json()).to_json() == c.to_json());
  }

  TEST_CASE("training smoke: one log row per step, annealed KL weight") {
    const auto m = tiny_data();
    const auto c = tiny_config();
    const auto trained = vaegan::train_vaegan(m, c);
    REQUIRE(trained.log.size() == static_cast<std::size_t>(c.total_steps));
    CHECK(trained.log.front().kl_weight == 0.0);
    for (std::size_t i = 0; i < trained.log.size(); ++i) {
      CHECK(trained.log[i].step == static_cast<std::int64_t>(i));
      CHECK(std::isfinite(trained.log[i].d_loss));
    }
    CHECK(trained.model.step() == c.total_steps);
  }

  TEST_CASE("short training reduces held-out reconstruction error") {
    const auto m = data::make_longtail_synthetic({4, 60, 10, 0.6, {3, 16, 16}, 5, "s"});
    const auto probe =
        data::make_synthetic_with_counts(std::vector<std::int64_t>(4, 5), {3, 16, 16}, 6, "p").stack_all();
    auto c = tiny_config();
    c.latent_dim = 16;
    c.total_steps = 150;
    const vaegan::VaeGan untrained(c);
    const auto trained = vaegan::train_vaegan(m, c);
    const double before = vaegan::reconstruction_l1(untrained, probe);
    const double after = vaegan::reconstruction_l1(trained.model, probe);
    INFO("probe L1 " << before << " -> " << after);
    CHECK(after <= 0.8 * before);
  }

  TEST_CASE("training is deterministic given the seed") {
    const auto m = tiny_data();
    const auto a = vaegan::train_vaegan(m, tiny_config());
    const auto b = vaegan::train_vaegan(m, tiny_config());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
      CHECK(a.log[i].d_loss == b.log[i].d_loss);
      CHECK(a.log[i].recon_l1 == b.log[i].recon_l1);
    }
    const auto x = m.stack_all();
    CHECK(torch::equal(a.model.reconstruct(x), b.model.reconstruct(x)));
  }

  TEST_CASE("checkpoint round-trip gives bit-identical inference") {
    const auto dir = test_util::scratch_dir("vaegan_ckpt");
    const auto m = tiny_data();
    const auto trained = vaegan::train_vaegan(m, tiny_config());
    trained.model.save(dir / "m.pt");
    const auto back = vaegan::VaeGan::load(dir / "m.pt");
    CHECK(back.config().to_json() == trained.model.config().to_json());
    CHECK(back.step() == trained.model.step());
    const auto x = m.stack_all();
    CHECK(test_util::bit_identical(back.encode(x).mu, trained.model.encode(x).mu));
    CHECK(test_util::bit_identical(back.encode(x).log_var, trained.model.encode(x).log_var));
    CHECK(test_util::bit_identical(back.reconstruct(x), trained.model.reconstruct(x)));
    CHECK(test_util::bit_identical(back.discriminate(x), trained.model.discriminate(x)));
  }

  TEST_CASE("loss log CSV round-trip") {
    const auto dir = test_util::scratch_dir("vaegan_log");
    std::vector<vaegan::LossRecord> log{{0, 1.5, -0.25, 0.5, 0.125, 0.01, 0.0},
                                        {1, 1.25, 0.1, 0.4, 0.1, 0.02, 0.5}};
    vaegan::write_loss_log(log, dir / "l.csv");
    const auto back = vaegan::read_loss_log(dir / "l.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[1].step == 1);
    CHECK(back[1].d_loss == 1.25);
    CHECK(back[1].kl_weight == 0.5);
  }

  TEST_CASE("training rejects mismatched data") {
    auto c = tiny_config();
    c.image_shape = ImageShape{3, 8, 8};
    CHECK_THROWS_AS(vaegan::train_vaegan(tiny_data(), c), ValidationError);
  }
}
