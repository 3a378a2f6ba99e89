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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "semaug/data.hpp"

namespace semaug::data {

namespace {

using Rgb = std::array<double, 3>;

Rgb hsv_to_rgb(double h, double s, double v) {
  const double hh = std::fmod(h, 1.0) * 6.0;
  const int sector = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

double box_sdf(double x, double y, double bx, double by) {
  const double dx = std::abs(x) - bx;
  const double dy = std::abs(y) - by;
  const double ox = std::max(dx, 0.0);
  const double oy = std::max(dy, 0.0);
  return std::hypot(ox, oy) + std::min(std::max(dx, dy), 0.0);
}

double triangle_sdf(double x, double y, double r) {
  const double k = std::numbers::sqrt3;
  x = std::abs(x) - r;
  y = y + r / k;
  if (x + k * y > 0.0) {
    const double nx = (x - k * y) / 2.0;
    const double ny = (-k * x - y) / 2.0;
    x = nx;
    y = ny;
  }
  x -= std::clamp(x, -2.0 * r, 0.0);
  return -std::hypot(x, y) * (y < 0.0 ? -1.0 : 1.0);
}

// Signed distance (pixels) to glyph `kind` in its local frame, radius r.
double glyph_sdf(int kind, double x, double y, double r) {
  switch (kind) {
    case 0: return std::hypot(x, y) - r;
    case 1: return std::abs(std::hypot(x, y) - 0.72 * r) - 0.2 * r;
    case 2: return box_sdf(x, y, 0.78 * r, 0.78 * r);
    case 3: return std::abs(box_sdf(x, y, 0.78 * r, 0.78 * r)) - 0.17 * r;
    case 4: return triangle_sdf(x, y, 0.9 * r);
    case 5: return std::min(box_sdf(x, y, r, 0.26 * r), box_sdf(x, y, 0.26 * r, r));
    default:
      return std::min(box_sdf(x, y - 0.45 * r, r, 0.18 * r),
                      box_sdf(x, y + 0.45 * r, r, 0.18 * r));
  }
}

constexpr int kGlyphKinds = 7;

}  // namespace

std::vector<std::int64_t> longtail_counts(std::int64_t class_count, std::int64_t head_count,
                                          std::int64_t tail_count, double decay) {
  if (class_count < 1) throw ValidationError("class_count must be >= 1");
  if (!(decay > 0.0 && decay <= 1.0)) throw ValidationError("decay must lie in (0, 1]");
  if (tail_count < 1 || head_count < tail_count) {
    throw ValidationError("counts must satisfy head >= tail >= 1");
  }
  std::vector<std::int64_t> counts;
  for (std::int64_t c = 0; c < class_count; ++c) {
    const double n = static_cast<double>(head_count) * std::pow(decay, static_cast<double>(c));
    counts.push_back(std::max<std::int64_t>(std::llround(n), tail_count));
  }
  return counts;
}

torch::Tensor render_glyph(std::int64_t label, const ImageShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> noise(0.0, 1.0);

  const int kind = static_cast<int>(label % kGlyphKinds);
  const double stretch = 1.0 + 0.35 * static_cast<double>(label / kGlyphKinds);
  const double h = static_cast<double>(shape.height);
  const double w = static_cast<double>(shape.width);
  const double extent = std::min(h, w);

  // Pose: position, size and rotation.
  const double cx = w * (0.5 + uniform(-0.15, 0.15));
  const double cy = h * (0.5 + uniform(-0.15, 0.15));
  const double radius = 0.27 * extent * uniform(0.75, 1.15);
  const double angle = uniform(0.0, 2.0 * std::numbers::pi);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);

  // Color and lighting.
  const Rgb fg = hsv_to_rgb(unit(rng), uniform(0.35, 1.0), uniform(0.55, 1.0));
  const Rgb bg = hsv_to_rgb(unit(rng), uniform(0.0, 0.6), uniform(0.1, 0.45));
  const double light_dir = uniform(0.0, 2.0 * std::numbers::pi);
  const double light_amp = uniform(0.0, 0.3);
  const double lx = std::cos(light_dir) / extent;
  const double ly = std::sin(light_dir) / extent;
  const double noise_sigma = 0.07;

  // Distractor blob unrelated to the class.
  const bool has_blob = unit(rng) < 0.5;
  const double bx = w * uniform(0.1, 0.9);
  const double by = h * uniform(0.1, 0.9);
  const double br = 0.08 * extent * uniform(0.7, 1.3);
  const Rgb blob = hsv_to_rgb(unit(rng), uniform(0.2, 1.0), uniform(0.3, 0.9));

  auto rgb = torch::empty({3, shape.height, shape.width}, torch::kFloat32);
  auto acc = rgb.accessor<float, 3>();
  for (std::int64_t iy = 0; iy < shape.height; ++iy) {
    for (std::int64_t ix = 0; ix < shape.width; ++ix) {
      const double px = static_cast<double>(ix) + 0.5;
      const double py = static_cast<double>(iy) + 0.5;
      const double dx = px - cx;
      const double dy = py - cy;
      const double u = (ca * dx + sa * dy) / stretch;
      const double v = -sa * dx + ca * dy;
      const double alpha = std::clamp(0.5 - glyph_sdf(kind, u, v, radius), 0.0, 1.0);
      const double beta =
          has_blob ? std::clamp(0.5 - (std::hypot(px - bx, py - by) - br), 0.0, 1.0) : 0.0;
      const double shade = 1.0 + light_amp * ((px - cx) * lx + (py - cy) * ly) * 2.0;
      for (int ch = 0; ch < 3; ++ch) {
        double value = bg[ch] * (1.0 - beta) + blob[ch] * beta;
        value = value * (1.0 - alpha) + fg[ch] * alpha;
        value = value * shade + noise_sigma * noise(rng);
        acc[ch][iy][ix] = static_cast<float>(std::clamp(value, 0.0, 1.0) * 2.0 - 1.0);
      }
    }
  }
  if (shape.channels == 3) return rgb;
  if (shape.channels == 1) {
    return (0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]).unsqueeze(0).clamp(-1.0, 1.0);
  }
  throw ValidationError("synthetic images support 1 or 3 channels");
}

DatasetManifest make_synthetic_with_counts(std::span<const std::int64_t> counts,
                                           const ImageShape& shape, std::uint64_t seed,
                                           const std::string& id_prefix) {
  std::vector<LabeledSample> samples;
  const auto class_count = static_cast<std::int64_t>(counts.size());
  for (std::int64_t c = 0; c < class_count; ++c) {
    for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) {
      LabeledSample s;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "-c%02lld-%05lld", static_cast<long long>(c),
                    static_cast<long long>(i));
      s.id = id_prefix + buf;
      s.label = c;
      s.image = render_glyph(c, shape,
                             derive_seed(seed, static_cast<std::uint64_t>(c),
                                         static_cast<std::uint64_t>(i)));
      samples.push_back(std::move(s));
    }
  }
  std::vector<std::string> names;
  static constexpr std::array<const char*, kGlyphKinds> kNames{
      "disc", "ring", "square", "frame", "triangle", "plus", "bars"};
  for (std::int64_t c = 0; c < class_count; ++c) {
    std::string name = kNames[static_cast<std::size_t>(c % kGlyphKinds)];
    if (c >= kGlyphKinds) name += "-x" + std::to_string(c / kGlyphKinds + 1);
    names.push_back(std::move(name));
  }
  return DatasetManifest(std::move(samples), class_count, shape, std::move(names));
}

DatasetManifest make_longtail_synthetic(const SyntheticSpec& spec) {
  const auto counts =
      longtail_counts(spec.class_count, spec.head_count, spec.tail_count, spec.decay);
  return make_synthetic_with_counts(counts, spec.image_shape, spec.seed, spec.id_prefix);
}

}  // namespace semaug::data
