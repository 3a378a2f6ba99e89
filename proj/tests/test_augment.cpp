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
#include "semaug/augment/augmented_view.hpp"
#include "semaug/augment/class_stats.hpp"
#include "semaug/augment/synthesis.hpp"
#include "semaug/image_io.hpp"
#include "test_util.hpp"

using namespace semaug;
using namespace semaug::augment;

namespace {

ClassStatsEntry entry(std::vector<double> sigma2) {
  ClassStatsEntry e;
  e.count = 10;
  e.mean.assign(sigma2.size(), 0.0);
  e.sigma2 = std::move(sigma2);
  return e;
}

std::vector<double> empirical_variance(const std::vector<double>& mu, const ClassStatsEntry& e,
                                       double s, std::uint64_t seed, int n) {
  Rng rng(seed);
  const auto d = mu.size();
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto z = augment_latent(mu, e, s, rng);
    for (std::size_t j = 0; j < d; ++j) {
      sum[j] += z[j] - mu[j];
      sq[j] += (z[j] - mu[j]) * (z[j] - mu[j]);
    }
  }
  std::vector<double> var(d);
  for (std::size_t j = 0; j < d; ++j) var[j] = sq[j] / n - (sum[j] / n) * (sum[j] / n);
  return var;
}

struct Fixture {
  data::DatasetManifest train;
  vaegan::VaeGan model;
  ClassStats stats;

  Fixture()
      : train(data::make_longtail_synthetic({3, 10, 3, 0.5, {3, 16, 16}, 9, "a"})),
        model(config()),
        stats(class_stats_for(model, train)) {}

  static vaegan::VaeGanConfig config() {
    vaegan::VaeGanConfig c;
    c.latent_dim = 6;
    c.image_shape = ImageShape{3, 16, 16};
    c.base_channels = 4;
    c.seed = 2;
    return c;
  }
};

}  // namespace

TEST_SUITE("augment") {
  TEST_CASE("augment_latent: zero strength and zero variance are exact identities") {
    const std::vector<double> mu{0.5, -1.25, 3.0};
    Rng rng(1);
    CHECK(augment_latent(mu, entry({1.0, 2.0, 3.0}), 0.0, rng) == mu);
    CHECK(augment_latent(mu, entry({0.0, 0.0, 0.0}), 5.0, rng) == mu);
    CHECK_THROWS_AS(augment_latent(mu, entry({1.0, 1.0, 1.0}), -0.1, rng), ValidationError);
    CHECK_THROWS_AS(augment_latent(std::vector<double>{1.0}, entry({1.0, 1.0}), 1.0, rng), ValidationError);
  }

  TEST_CASE("augment_latent: variances s * sigma2 within 5%") {
    const auto var = empirical_variance({0.0, 0.0}, entry({1.0, 4.0}), 2.0, 17, 100000);
    CHECK(std::fabs(var[0] / 2.0 - 1.0) <= 0.05);
    CHECK(std::fabs(var[1] / 8.0 - 1.0) <= 0.05);
  }

  TEST_CASE("augment_latent: variance scales linearly in s") {
    const auto e = entry({0.5, 1.5, 3.0});
    const std::vector<double> mu{1.0, 2.0, -3.0};
    const auto base = empirical_variance(mu, e, 1.0, 3, 100000);
    for (double s : {0.5, 2.0}) {
      const auto v = empirical_variance(mu, e, s, 4, 100000);
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(v[j] / base[j] / s - 1.0) <= 0.10);
    }
  }

  TEST_CASE("plan validation") {
    const std::vector<std::int64_t> hist{10, 3, 0};
    auto plan = AugmentPlan::balanced(hist, 1.0, 0.5, 0);
    CHECK(plan.targets == std::vector<std::int64_t>{10, 10, 10});
    CHECK_THROWS_AS(plan.validate(hist), ValidationError);
    plan.targets = {10, 2, 0};
    CHECK_THROWS_AS(plan.validate(hist), ValidationError);
    plan.targets = {10, 3, 0};
    CHECK_NOTHROW(plan.validate(hist));
    plan.strength = -1.0;
    CHECK_THROWS_AS(plan.validate(hist), ValidationError);
  }

  TEST_CASE("synthesize_balanced: exact balance, labels kept, originals untouched") {
    Fixture f;
    const auto before = f.train.fingerprint();
    const auto plan = AugmentPlan::balanced(f.train.histogram(), 1.0, 0.5, 21);
    const auto aug = synthesize_balanced(f.train, f.model, f.stats, plan);
    CHECK(f.train.fingerprint() == before);
    const auto gen = aug.histogram();
    for (std::size_t c = 0; c < gen.size(); ++c) CHECK(gen[c] + f.train.histogram()[c] == plan.targets[c]);
    for (const auto& g : aug.samples()) {
      const auto src = f.train.find(g.source_id);
      REQUIRE(src.has_value());
      CHECK(f.train[*src].label == g.label);
      CHECK(g.image.abs().max().item<float>() <= 1.0f);
    }
    auto same = plan;
    same.targets = f.train.histogram();
    CHECK(synthesize_balanced(f.train, f.model, f.stats, same).size() == 0);
  }

  TEST_CASE("synthesize_balanced is deterministic and zero strength decodes the source mean") {
    Fixture f;
    auto plan = AugmentPlan::balanced(f.train.histogram(), 1.0, 0.5, 3);
    const auto a = synthesize_balanced(f.train, f.model, f.stats, plan);
    const auto b = synthesize_balanced(f.train, f.model, f.stats, plan);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(torch::equal(a[i].image, b[i].image));

    plan.strength = 0.0;
    const auto zero = synthesize_balanced(f.train, f.model, f.stats, plan);
    for (const auto& g : zero.samples()) {
      const auto& src = f.train[*f.train.find(g.source_id)];
      const auto expected = f.model.decode(f.model.encode(src.image.unsqueeze(0)).mu).squeeze(0);
      CHECK(torch::equal(g.image, expected));
    }
  }

  TEST_CASE("augmented dataset save/load") {
    Fixture f;
    const auto dir = test_util::scratch_dir("augment_io");
    const auto aug = synthesize_balanced(f.train, f.model, f.stats,
                                         AugmentPlan::balanced(f.train.histogram(), 1.0, 0.5, 1));
    const auto path = save_augmented(aug, f.train, dir);
    const auto back = load_augmented(path, f.train);
    REQUIRE(back.size() == aug.size());
    for (std::size_t i = 0; i < aug.size(); ++i) {
      CHECK(back[i].label == aug[i].label);
      CHECK(back[i].source_id == aug[i].source_id);
      CHECK(torch::equal(back[i].image, image_io::quantize(aug[i].image)));
    }
    const auto other = data::make_longtail_synthetic({3, 10, 3, 0.5, {3, 16, 16}, 10, "a"});
    CHECK_THROWS_AS(load_augmented(path, other), ValidationError);
  }

  TEST_CASE("augmented view: generated share, ratio 0 and original-only modes") {
    Fixture f;
    const auto aug = synthesize_balanced(f.train, f.model, f.stats,
                                         AugmentPlan::balanced(f.train.histogram(), 1.0, 0.5, 1));
    // Classes 1 and 2 have generated samples; class 0 is the head.
    const AugmentedView half(f.train, &aug, data::ClassBalanced{0.5});
    Rng rng(5);
    double generated = 0, eligible = 0;
    for (const auto& s : half.draw_batch(20000, rng)) {
      if (s.label == 0) continue;
      ++eligible;
      generated += s.generated;
    }
    CHECK(std::fabs(generated / eligible - 0.5) <= 0.02);

    const AugmentedView none(f.train, &aug, data::ClassBalanced{0.0});
    Rng r1(8), r2(8);
    const auto drawn = none.draw_batch(500, r1);
    const auto reference = data::balanced_batch_indices(f.train, 500, r2);
    for (std::size_t i = 0; i < drawn.size(); ++i) {
      CHECK_FALSE(drawn[i].generated);
      CHECK(drawn[i].index == reference[i]);
    }

    const AugmentedView originals(f.train, &aug, data::OriginalOnly{});
    for (const auto& s : originals.draw_batch(2000, rng)) CHECK_FALSE(s.generated);
  }
}
