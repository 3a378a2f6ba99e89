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
#include <functional>
#include <string>
#include <vector>

#include "semaug/augment/synthesis.hpp"
#include "semaug/data.hpp"
#include "semaug/evalcls/classifier.hpp"
#include "semaug/evalcls/metrics.hpp"

namespace semaug::evalcls {

struct RunResult {
  Strategy strategy = Strategy::None;
  std::uint64_t seed = 0;
  EvalReport report;
  std::vector<EpochRecord> log;
};

struct Spread {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ComparisonRow {
  std::string classifier;
  Strategy strategy = Strategy::None;
  std::size_t runs = 0;
  Spread total_precision;
  Spread mean_ap;
};

struct Comparison {
  std::vector<RunResult> runs;
  std::vector<ComparisonRow> rows;

  /// | classifier | augmentation | Total Precision | mAP |, one row per
  /// strategy, cells "mean [min, max]".
  std::string markdown() const;
  /// One row per run.
  std::string csv() const;
};

std::vector<ComparisonRow> summarize(const std::vector<RunResult>& runs,
                                     const std::string& classifier);

using RunCallback = std::function<void(const RunResult&, const Classifier&)>;

/// Trains and evaluates one classifier per (strategy, seed). Each run
/// carves a stratified validation split of config.val_fraction out of
/// `train` (seeded by the run seed) for monitoring; reports come from `test`.
Comparison run_strategy_comparison(const data::DatasetManifest& train,
                                   const data::DatasetManifest& test,
                                   const augment::AugmentedDataset* augmented,
                                   const std::vector<Strategy>& strategies,
                                   const std::vector<std::uint64_t>& seeds,
                                   const ClassifierConfig& base, const RunCallback& on_run = {});

}  // namespace semaug::evalcls
