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
#include <filesystem>
#include <fstream>

#include "doctest_torch.hpp"
#include "oracles.hpp"
#include "semaug/data.hpp"
#include "semaug/image_io.hpp"
#include "test_util.hpp"

using namespace semaug;
namespace fs = std::filesystem;

namespace {

data::DatasetManifest tiny_manifest(const std::vector<std::int64_t>& counts) {
  std::vector<data::LabeledSample> samples;
  const auto img = torch::zeros({1, 1, 1});
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::int64_t i = 0; i < counts[c]; ++i) {
      samples.push_back({"s" + std::to_string(c) + "-" + std::to_string(i), std::nullopt, img,
                         static_cast<std::int64_t>(c)});
    }
  }
  return data::DatasetManifest(std::move(samples), static_cast<std::int64_t>(counts.size()),
                               ImageShape{1, 1, 1});
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("longtail counts follow round(head * decay^c) clamped at tail") {
    const auto counts = data::longtail_counts(7, 477, 28, 0.62);
    std::vector<std::int64_t> expected;
    for (int c = 0; c < 7; ++c) {
      expected.push_back(std::max<std::int64_t>(28, std::llround(477.0 * std::pow(0.62, c))));
    }
    CHECK(counts == expected);
    CHECK(counts == std::vector<std::int64_t>{477, 296, 183, 114, 70, 44, 28});
    CHECK(data::longtail_counts(4, 50, 50, 1.0) == std::vector<std::int64_t>(4, 50));
  }

  TEST_CASE("longtail counts reject invalid parameters") {
    CHECK_THROWS_AS(data::longtail_counts(7, 477, 28, 1.5), ValidationError);
    CHECK_THROWS_AS(data::longtail_counts(7, 477, 28, 0.0), ValidationError);
    CHECK_THROWS_AS(data::longtail_counts(7, 20, 28, 0.5), ValidationError);
  }

  TEST_CASE("synthetic generator is deterministic and honours the histogram") {
    data::SyntheticSpec spec{3, 12, 3, 0.5, {3, 16, 16}, 5, "t"};
    const auto a = data::make_longtail_synthetic(spec);
    const auto b = data::make_longtail_synthetic(spec);
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.histogram() == std::vector<std::int64_t>{12, 6, 3});
    CHECK(data::compute_histogram(a.samples(), 3) == a.histogram());
    spec.seed = 6;
    CHECK(data::make_longtail_synthetic(spec).fingerprint() != a.fingerprint());
    for (const auto& s : a.samples()) {
      CHECK(s.image.min().item<float>() >= -1.0f);
      CHECK(s.image.max().item<float>() <= 1.0f);
    }
  }

  TEST_CASE("manifest validation reports the offending sample") {
    std::vector<data::LabeledSample> bad{{"a", std::nullopt, torch::zeros({1, 2, 2}), 3}};
    CHECK_THROWS_AS(data::DatasetManifest(bad, 2, ImageShape{1, 2, 2}), data::ManifestError);
    bad[0].label = 0;
    bad[0].image = torch::zeros({1, 3, 3});
    CHECK_THROWS_AS(data::DatasetManifest(bad, 2, ImageShape{1, 2, 2}), data::ManifestError);
    bad[0].image = torch::full({1, 2, 2}, 1.5);
    CHECK_THROWS_AS(data::DatasetManifest(bad, 2, ImageShape{1, 2, 2}), data::ManifestError);
  }

  TEST_CASE("manifest save/load round-trips on the 8-bit grid") {
    const auto dir = test_util::scratch_dir("data_roundtrip");
    data::SyntheticSpec spec{3, 6, 2, 0.5, {3, 8, 8}, 1, "rt"};
    const auto m = data::make_longtail_synthetic(spec);
    data::save_manifest(m, dir / "m.jsonl", dir / "images");
    const auto back = data::load_manifest(dir / "m.jsonl");
    REQUIRE(back.size() == m.size());
    CHECK(back.histogram() == m.histogram());
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(back[i].id == m[i].id);
      CHECK(torch::equal(back[i].image, image_io::quantize(m[i].image)));
    }
  }

  TEST_CASE("manifest loader errors carry line numbers") {
    const auto dir = test_util::scratch_dir("data_errors");
    auto write = [&](const std::string& text) {
      std::ofstream(dir / "m.jsonl") << text;
      return dir / "m.jsonl";
    };
    const std::string header = R"({"class_count": 2, "image_shape": [1, 1, 1]})";
    auto message = [&](const fs::path& p) {
      try {
        data::load_manifest(p);
      } catch (const data::ManifestError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message(write(header + "\n{\"pixels\": [0.0], \"label\": 5}\n")).find("line 2") != std::string::npos);
    CHECK(message(write(header + "\n{\"pixels\": [0.0], \"label\": 0}\n{oops\n")).find("line 3") != std::string::npos);
    CHECK(message(write(header + "\n{\"path\": \"missing.png\", \"label\": 0}\n")).find("not found") != std::string::npos);
    CHECK(data::load_manifest(write(header + "\n")).empty());
  }

  TEST_CASE("balanced sampler: per-class frequencies are uniform") {
    const auto m = tiny_manifest({100, 10, 1});
    Rng rng(11);
    const auto idx = data::balanced_batch_indices(m, 30000, rng);
    std::vector<double> share(3, 0.0);
    for (auto i : idx) share[static_cast<std::size_t>(m[i].label)] += 1.0 / 30000.0;
    for (double s : share) CHECK(std::fabs(s - 1.0 / 3.0) <= 0.01);

    const auto two = tiny_manifest({5, 5});
    double class0 = 0.0;
    for (int b = 0; b < 10000; ++b) {
      for (auto i : data::balanced_batch_indices(two, 2, rng)) class0 += two[i].label == 0;
    }
    class0 /= 20000.0;
    CHECK(class0 >= 0.48);
    CHECK(class0 <= 0.52);
  }

  TEST_CASE("balanced sampler: single class and explicit empty class") {
    const auto m = tiny_manifest({4, 0});
    Rng rng(2);
    for (const auto& id : data::balanced_batch(m, 50, rng)) CHECK(id.rfind("s0-", 0) == 0);
    const std::vector<std::int64_t> trainable{0, 1};
    CHECK_THROWS_AS(data::balanced_batch(m, 5, rng, trainable), ValidationError);
  }

  TEST_CASE("balanced sampler is a pure function of the seed") {
    const auto m = tiny_manifest({9, 3, 2});
    Rng a(99), b(99);
    CHECK(data::balanced_batch_indices(m, 64, a) == data::balanced_batch_indices(m, 64, b));
  }

  TEST_CASE("epoch_mode: exhaustive schedule boundary") {
    for (int total = 1; total <= 64; ++total) {
      for (int tail = 0; tail <= total; ++tail) {
        for (int e = 0; e < total; ++e) {
          const auto mode = data::epoch_mode(e, total, tail, 0.5);
          const bool original = std::holds_alternative<data::OriginalOnly>(mode);
          REQUIRE(original == (e >= total - tail));
          if (!original) CHECK(std::get<data::ClassBalanced>(mode).augment_ratio == 0.5);
        }
      }
    }
    CHECK_THROWS_AS(data::epoch_mode(40, 40, 5, 0.5), ValidationError);
    CHECK_THROWS_AS(data::epoch_mode(0, 40, 41, 0.5), ValidationError);
  }

  TEST_CASE("stratified split keeps every class on both sides") {
    const auto m = tiny_manifest({50, 10, 2});
    const auto [fit, val] = data::stratified_split(m, 0.1, 3);
    CHECK(fit.size() + val.size() == m.size());
    for (std::int64_t c = 0; c < 3; ++c) {
      CHECK(fit.histogram()[c] >= 1);
      CHECK(val.histogram()[c] >= 1);
    }
  }
}
