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
#include <map>
#include <string>
#include <vector>

#include "semaug/evalcls/classifier.hpp"
#include "semaug/vaegan/config.hpp"

namespace semaug::cli {

struct DataOptions {
  // When set, used instead of the manifests under <out>/data.
  std::string train_manifest;
  std::string test_manifest;
  std::int64_t classes = 7;
  std::int64_t head = 477;
  std::int64_t tail = 28;
  double decay = 0.62;
  std::int64_t image_size = 32;
  std::int64_t test_per_class = 50;
};

struct AugmentOptions {
  double strength = 1.0;
  double ratio = 0.5;
  std::string covariance = "diagonal";
  // Augmentations per grid row.
  std::int64_t grid_k = 8;
  // When set, used instead of <out>/augment/augmented.jsonl.
  std::string augmented;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "semaug_out";
  DataOptions data;
  vaegan::VaeGanConfig vaegan;
  // When set, used instead of <out>/vaegan/model.pt.
  std::string checkpoint;
  AugmentOptions augment;
  evalcls::ClassifierConfig classifier;
  std::vector<std::string> strategies{"none", "balanced", "ours"};
  // Empty means {seed, seed + 1, seed + 2}.
  std::vector<std::uint64_t> seeds;

  /// Throws ValidationError naming the offending flag.
  void validate() const;
  std::string to_json() const;

  std::filesystem::path train_manifest_path() const;
  std::filesystem::path test_manifest_path() const;
  std::filesystem::path checkpoint_path() const;
  std::filesystem::path augmented_path() const;
  std::vector<std::uint64_t> run_seeds() const;
};

struct RunArtifacts {
  std::map<std::string, std::filesystem::path> paths;
  std::map<std::string, double> metrics;

  void merge(const RunArtifacts& other);
};

RunArtifacts cmd_gen_data(const ExperimentConfig& config);
RunArtifacts cmd_train_vaegan(const ExperimentConfig& config);
RunArtifacts cmd_augment(const ExperimentConfig& config);
RunArtifacts cmd_compare(const ExperimentConfig& config);
RunArtifacts cmd_all(const ExperimentConfig& config);

/// Writes <out>/run_summary.json: command, version, resolved config, its
/// hash, artifact paths and metrics. Throws RuntimeFailure if a listed
/// artifact is missing.
std::filesystem::path write_run_summary(const std::string& command,
                                        const ExperimentConfig& config,
                                        const RunArtifacts& artifacts);

std::string version();

/// Full command-line entry point. Returns 0 on success, 1 on validation
/// errors (bad flags, config or inputs), 2 on runtime failures.
int run(int argc, const char* const* argv);

}  // namespace semaug::cli
