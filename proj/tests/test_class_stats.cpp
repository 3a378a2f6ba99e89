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
#include "semaug/augment/class_stats.hpp"
#include "test_util.hpp"

using namespace semaug;
using namespace semaug::augment;

namespace {

struct Instance {
  std::vector<std::vector<double>> x;
  std::vector<std::int64_t> y;
  std::int64_t classes = 0;
};

Instance random_instance(Rng& rng, std::size_t d, std::size_t n, std::int64_t classes,
                         bool with_singleton) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> label(0, classes - 1);
  std::uniform_real_distribution<double> offset(-50.0, 50.0);
  Instance inst;
  inst.classes = classes;
  std::vector<double> shift(d);
  for (auto& s : shift) s = offset(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t c = label(rng);
    if (with_singleton && c == 0) c = 1 % classes;
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = shift[j] + (1.0 + c) * normal(rng);
    inst.x.push_back(row);
    inst.y.push_back(c);
  }
  if (with_singleton) {
    std::vector<double> row(d);
    for (auto& v : row) v = normal(rng);
    inst.x.push_back(row);
    inst.y.push_back(0);
  }
  return inst;
}

}  // namespace

TEST_SUITE("class_stats") {
  TEST_CASE("two-sample class: mean (1,1), variance (2,2)") {
    const std::vector<std::vector<double>> x{{0, 0}, {2, 2}};
    const std::vector<std::int64_t> y{0, 0};
    const auto s = compute_class_stats(x, y, 1);
    CHECK(s[0].mean == std::vector<double>{1, 1});
    CHECK(s[0].sigma2 == std::vector<double>{2, 2});
    CHECK_FALSE(s[0].fallback_used);
  }

  TEST_CASE("identical vectors give zero variance") {
    const std::vector<std::vector<double>> x(5, {3.5, -1.0, 0.25});
    const std::vector<std::int64_t> y(5, 0);
    const auto s = compute_class_stats(x, y, 1);
    CHECK(s[0].sigma2 == std::vector<double>{0, 0, 0});
  }

  TEST_CASE("matches the two-pass oracle, singleton fallback included") {
    Rng rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t d = 1 + trial % 16;
      const std::size_t n = 3 + static_cast<std::size_t>(trial) * 25;
      const auto inst = random_instance(rng, d, n, 2 + trial % 5, trial % 2 == 0);
      const auto got = compute_class_stats(inst.x, inst.y, inst.classes);
      const auto want = oracle::naive_class_stats(inst.x, inst.y, inst.classes);
      for (std::int64_t c = 0; c < inst.classes; ++c) {
        CHECK(got[c].count == want.count[c]);
        CHECK(got[c].fallback_used == want.fallback[c]);
        for (std::size_t j = 0; j < d; ++j) {
          if (want.count[c] > 0) CHECK(oracle::rel_error(got[c].mean[j], want.mean[c][j]) <= 1e-10);
          CHECK(oracle::rel_error(got[c].sigma2[j], want.sigma2[c][j]) <= 1e-10);
        }
      }
    }
  }

  TEST_CASE("every class a singleton: global variance fallback") {
    const std::vector<std::vector<double>> x{{0.0}, {2.0}, {4.0}};
    const std::vector<std::int64_t> y{0, 1, 2};
    const auto s = compute_class_stats(x, y, 3);
    for (std::int64_t c = 0; c < 3; ++c) {
      CHECK(s[c].fallback_used);
      CHECK(s[c].sigma2[0] == doctest::Approx(4.0));
    }
  }

  TEST_CASE("errors: empty input and bad labels") {
    const std::vector<std::vector<double>> none;
    const std::vector<std::int64_t> no_labels;
    CHECK_THROWS_AS(compute_class_stats(none, no_labels, 2), ValidationError);
    const std::vector<std::vector<double>> x{{1.0}};
    const std::vector<std::int64_t> y{3};
    CHECK_THROWS_AS(compute_class_stats(x, y, 2), ValidationError);
  }

  TEST_CASE("json round-trip") {
    Rng rng(5);
    const auto inst = random_instance(rng, 4, 30, 3, true);
    const auto s = compute_class_stats(inst.x, inst.y, inst.classes);
    const auto dir = test_util::scratch_dir("stats_json");
    s.save(dir / "s.json");
    const auto back = ClassStats::load(dir / "s.json");
    REQUIRE(back.class_count() == s.class_count());
    for (std::int64_t c = 0; c < s.class_count(); ++c) {
      CHECK(back[c].count == s[c].count);
      CHECK(back[c].mean == s[c].mean);
      CHECK(back[c].sigma2 == s[c].sigma2);
      CHECK(back[c].fallback_used == s[c].fallback_used);
    }
  }

  TEST_CASE("full covariance factor reproduces the sample covariance") {
    Rng rng(8);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> x;
    for (int i = 0; i < 200; ++i) {
      const double a = normal(rng), b = normal(rng);
      x.push_back({a, a + 0.5 * b, -a});
    }
    const std::vector<std::int64_t> y(x.size(), 0);
    const auto s = compute_class_stats(x, y, 1, StatsOptions{true});
    REQUIRE(s[0].cholesky.has_value());
    const Eigen::MatrixXd cov = (*s[0].cholesky) * s[0].cholesky->transpose();
    for (int j = 0; j < 3; ++j) CHECK(cov(j, j) == doctest::Approx(s[0].sigma2[j]).epsilon(1e-6));
  }
}
