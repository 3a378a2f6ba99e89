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
#include <cmath>

#include "semaug/data.hpp"

namespace semaug::data {

std::vector<std::size_t> balanced_batch_indices(const DatasetManifest& manifest,
                                                std::size_t batch_size, Rng& rng,
                                                std::span<const std::int64_t> trainable) {
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  std::vector<std::int64_t> classes;
  if (trainable.empty()) {
    for (std::int64_t c = 0; c < manifest.class_count(); ++c) {
      if (manifest.histogram()[static_cast<std::size_t>(c)] > 0) classes.push_back(c);
    }
  } else {
    for (auto c : trainable) {
      if (c < 0 || c >= manifest.class_count()) {
        throw ValidationError("trainable class " + std::to_string(c) + " out of range");
      }
      if (manifest.histogram()[static_cast<std::size_t>(c)] == 0) {
        throw ValidationError("trainable class " + std::to_string(c) + " has no samples");
      }
      classes.push_back(c);
    }
  }
  if (classes.empty()) throw ValidationError("balanced sampling needs a nonempty class");

  std::uniform_int_distribution<std::size_t> pick_class(0, classes.size() - 1);
  std::vector<std::size_t> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto& members = manifest.class_indices(classes[pick_class(rng)]);
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    out.push_back(members[pick(rng)]);
  }
  return out;
}

std::vector<std::string> balanced_batch(const DatasetManifest& manifest,
                                        std::size_t batch_size, Rng& rng,
                                        std::span<const std::int64_t> trainable) {
  std::vector<std::string> ids;
  for (auto i : balanced_batch_indices(manifest, batch_size, rng, trainable)) {
    ids.push_back(manifest[i].id);
  }
  return ids;
}

SamplingMode epoch_mode(int epoch, int total_epochs, int original_only_tail,
                        double augment_ratio) {
  if (total_epochs < 1 || epoch < 0 || epoch >= total_epochs) {
    throw ValidationError("epoch " + std::to_string(epoch) + " outside [0, " +
                          std::to_string(total_epochs) + ")");
  }
  if (original_only_tail < 0 || original_only_tail > total_epochs) {
    throw ValidationError("original_only_tail must lie in [0, total_epochs]");
  }
  if (!(augment_ratio >= 0.0 && augment_ratio <= 1.0)) {
    throw ValidationError("augment_ratio must lie in [0, 1]");
  }
  if (epoch >= total_epochs - original_only_tail) return OriginalOnly{};
  return ClassBalanced{augment_ratio};
}

std::pair<DatasetManifest, DatasetManifest> stratified_split(const DatasetManifest& manifest,
                                                             double fraction,
                                                             std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ValidationError("split fraction must lie in [0, 1)");
  }
  std::vector<bool> held(manifest.size(), false);
  for (std::int64_t c = 0; c < manifest.class_count(); ++c) {
    auto members = manifest.class_indices(c);
    if (members.size() < 2 || fraction == 0.0) continue;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::shuffle(members.begin(), members.end(), rng);
    auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    n = std::clamp<std::size_t>(n, 1, members.size() - 1);
    for (std::size_t k = 0; k < n; ++k) held[members[k]] = true;
  }
  std::vector<LabeledSample> keep;
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    (held[i] ? out : keep).push_back(manifest[i]);
  }
  return {DatasetManifest(std::move(keep), manifest.class_count(), manifest.image_shape(),
                          manifest.class_names()),
          DatasetManifest(std::move(out), manifest.class_count(), manifest.image_shape(),
                          manifest.class_names())};
}

}  // namespace semaug::data
