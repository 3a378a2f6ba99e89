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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "semaug/augment/class_stats.hpp"
#include "semaug/data.hpp"
#include "semaug/vaegan/model.hpp"

namespace semaug::augment {

struct AugmentPlan {
  double strength = 1.0;
  double augment_ratio = 0.5;
  // Desired per-class totals (originals + generated).
  std::vector<std::int64_t> targets;
  std::uint64_t seed = 0;
  CovarianceMode covariance = CovarianceMode::Diagonal;

  /// Targets every class at the largest class count.
  static AugmentPlan balanced(std::span<const std::int64_t> histogram, double strength,
                              double augment_ratio, std::uint64_t seed);
  void validate(std::span<const std::int64_t> histogram) const;
};

struct GeneratedSample {
  std::string id;
  std::int64_t label = 0;
  std::string source_id;
  std::vector<float> latent;
  // [C, H, W] in [-1, 1].
  torch::Tensor image;
  // Seed of the RNG stream that produced the latent.
  std::uint64_t stream_seed = 0;
};

class AugmentedDataset {
 public:
  AugmentedDataset() = default;
  AugmentedDataset(std::uint64_t source_fingerprint, std::int64_t class_count,
                   double strength, std::vector<GeneratedSample> samples);

  std::uint64_t source_fingerprint() const { return source_fingerprint_; }
  std::int64_t class_count() const { return class_count_; }
  double strength() const { return strength_; }
  const std::vector<GeneratedSample>& samples() const { return samples_; }
  const GeneratedSample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<std::size_t>& class_indices(std::int64_t c) const {
    return by_class_.at(static_cast<std::size_t>(c));
  }
  std::vector<std::int64_t> histogram() const;

 private:
  std::uint64_t source_fingerprint_ = 0;
  std::int64_t class_count_ = 0;
  double strength_ = 0.0;
  std::vector<GeneratedSample> samples_;
  std::vector<std::vector<std::size_t>> by_class_;
};

/// Encoder means of every manifest sample, in manifest order.
std::vector<std::vector<double>> encode_means(const vaegan::VaeGan& model,
                                              const data::DatasetManifest& manifest,
                                              std::int64_t chunk = 64);

/// compute_class_stats over encode_means(model, manifest).
ClassStats class_stats_for(const vaegan::VaeGan& model, const data::DatasetManifest& manifest,
                           const StatsOptions& options = {});

/// For each class c, generates targets[c] - n_c samples. Sample k of class c
/// draws from its own stream seeded by (plan.seed, c, k): a uniformly chosen
/// class-c source, then augment_latent on that source's encoder mean, then
/// the decoder. The manifest is not modified.
AugmentedDataset synthesize_balanced(const data::DatasetManifest& manifest,
                                     const vaegan::VaeGan& model, const ClassStats& stats,
                                     const AugmentPlan& plan);

/// Writes generated images under `dir`/images and the manifest
/// `dir`/augmented.jsonl (data-manifest schema plus source_id, generated,
/// strength). Returns the manifest path.
std::filesystem::path save_augmented(const AugmentedDataset& augmented,
                                     const data::DatasetManifest& originals,
                                     const std::filesystem::path& dir);

/// Reads a directory written by save_augmented back, bound to `originals`.
/// Images come back on the 8-bit PNG grid; latents are not stored.
AugmentedDataset load_augmented(const std::filesystem::path& manifest_path,
                                const data::DatasetManifest& originals);

}  // namespace semaug::augment
