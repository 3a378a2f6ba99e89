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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <torch/torch.h>

#include "semaug/common.hpp"

namespace semaug::data {

/// Malformed manifest input. `line()` is 1-based, 0 when not tied to a line.
class ManifestError : public ValidationError {
 public:
  ManifestError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LabeledSample {
  std::string id;
  // Set when the sample was read from (or written to) an image file.
  std::optional<std::filesystem::path> path;
  // Float tensor [C, H, W] with values in [-1, 1]; always materialized.
  torch::Tensor image;
  std::int64_t label = 0;
};

/// Ordered, immutable collection of labeled samples with its class histogram.
class DatasetManifest {
 public:
  DatasetManifest() = default;
  /// Validates labels, image shapes and value range, then computes the
  /// histogram. Throws ManifestError on the first offending sample.
  DatasetManifest(std::vector<LabeledSample> samples, std::int64_t class_count,
                  ImageShape image_shape,
                  std::vector<std::string> class_names = {});

  const std::vector<LabeledSample>& samples() const { return samples_; }
  const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::int64_t class_count() const { return class_count_; }
  const ImageShape& image_shape() const { return image_shape_; }
  const std::vector<std::int64_t>& histogram() const { return histogram_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Sample indices of class `c`, in manifest order.
  const std::vector<std::size_t>& class_indices(std::int64_t c) const {
    return by_class_.at(static_cast<std::size_t>(c));
  }
  std::optional<std::size_t> find(const std::string& id) const;

  /// Stacks the images at `indices` into a [B, C, H, W] float tensor.
  torch::Tensor stack(std::span<const std::size_t> indices) const;
  torch::Tensor stack_all() const;

  /// Order-sensitive digest of ids, labels and pixel contents.
  std::uint64_t fingerprint() const;

 private:
  std::vector<LabeledSample> samples_;
  std::int64_t class_count_ = 0;
  ImageShape image_shape_;
  std::vector<std::string> class_names_;
  std::vector<std::int64_t> histogram_;
  std::vector<std::vector<std::size_t>> by_class_;
};

std::vector<std::int64_t> compute_histogram(
    std::span<const LabeledSample> samples, std::int64_t class_count);

/// Reads a JSONL manifest. The first line is the header object
/// {"class_count", "image_shape": [c,h,w], "class_names"?}; every later
/// non-blank line is {"path"| "pixels", "label", "id"?}. Relative paths are
/// resolved against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes every sample as a PNG under `image_dir` (relative to the manifest
/// when possible) plus the JSONL manifest itself. `extra_fields`, when given,
/// holds one JSON object per sample whose keys are merged into that line.
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& manifest_path,
                   const std::filesystem::path& image_dir,
                   const std::vector<std::string>& extra_fields = {});

// ---------------------------------------------------------------------------
// Synthetic long-tailed data
// ---------------------------------------------------------------------------

struct SyntheticSpec {
  std::int64_t class_count = 7;
  std::int64_t head_count = 477;
  std::int64_t tail_count = 28;
  double decay = 0.62;
  ImageShape image_shape{3, 32, 32};
  std::uint64_t seed = 0;
  // Prefix for generated sample ids; lets train and test sets coexist.
  std::string id_prefix = "syn";
};

/// Per-class counts round(head * decay^c), clamped below by tail_count.
std::vector<std::int64_t> longtail_counts(std::int64_t class_count,
                                          std::int64_t head_count,
                                          std::int64_t tail_count,
                                          double decay);

/// Renders one glyph image of class `label`; deterministic in `seed`.
torch::Tensor render_glyph(std::int64_t label, const ImageShape& shape,
                           std::uint64_t seed);

DatasetManifest make_longtail_synthetic(const SyntheticSpec& spec);

/// Same renderer with explicit per-class counts (used for test splits).
DatasetManifest make_synthetic_with_counts(
    std::span<const std::int64_t> counts, const ImageShape& shape,
    std::uint64_t seed, const std::string& id_prefix);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct ClassBalanced {
  double augment_ratio = 0.0;
  bool operator==(const ClassBalanced&) const = default;
};
struct OriginalOnly {
  bool operator==(const OriginalOnly&) const = default;
};
using SamplingMode = std::variant<ClassBalanced, OriginalOnly>;

/// Draws `batch_size` indices: a class uniformly among the trainable
/// classes, then a sample uniformly within it (with replacement).
/// `trainable` empty means "every nonempty class"; an explicitly listed
/// class without samples is an error.
std::vector<std::size_t> balanced_batch_indices(
    const DatasetManifest& manifest, std::size_t batch_size, Rng& rng,
    std::span<const std::int64_t> trainable = {});

std::vector<std::string> balanced_batch(
    const DatasetManifest& manifest, std::size_t batch_size, Rng& rng,
    std::span<const std::int64_t> trainable = {});

/// OriginalOnly for the last `original_only_tail` epochs, else
/// ClassBalanced{augment_ratio}.
SamplingMode epoch_mode(int epoch, int total_epochs, int original_only_tail,
                        double augment_ratio);

/// Stratified split: roughly `fraction` of each class (at least one sample
/// when the class has two or more) goes to the second manifest.
std::pair<DatasetManifest, DatasetManifest> stratified_split(
    const DatasetManifest& manifest, double fraction, std::uint64_t seed);

}  // namespace semaug::data
