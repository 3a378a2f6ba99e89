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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "semaug/data.hpp"

namespace semaug::evalcls {

inline constexpr const char* kApDefinition =
    "one-vs-rest average precision on softmax scores; samples sorted by descending score, "
    "ties kept in input order; AP = sum_k (R_k - R_{k-1}) * P_k over every prefix, no "
    "interpolation; classes without test positives are excluded from mAP";

/// Step-wise average precision. `positives[i]` is nonzero for positives.
/// Throws ValidationError when there is no positive, sizes differ or a
/// score is not finite.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> positives);

struct ReportMetadata {
  std::string strategy;
  std::uint64_t seed = 0;
  std::string dataset_id;
  std::string classifier;
  bool operator==(const ReportMetadata&) const = default;
};

struct EvalReport {
  // Empty entries mark classes without test positives.
  std::vector<std::optional<double>> per_class_ap;
  double mean_ap = 0.0;
  double total_precision = 0.0;
  // confusion[true][predicted].
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<std::int64_t> excluded_classes;
  ReportMetadata metadata;
  std::string ap_definition = kApDefinition;

  std::int64_t class_count() const { return static_cast<std::int64_t>(confusion.size()); }
  /// Row-normalized diagonal; NaN for classes absent from the test set.
  std::vector<double> per_class_recall() const;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
  bool operator==(const EvalReport&) const = default;
};

/// Anything that maps an image batch [B, C, H, W] to class probabilities [B, K].
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual torch::Tensor predict_scores(const torch::Tensor& images) const = 0;
  virtual std::int64_t class_count() const = 0;
};

/// Report from a score matrix [N, K] (rows are per-sample class scores) and
/// true labels. Predictions are the first maximal column of each row.
EvalReport evaluate_scores(const torch::Tensor& scores, std::span<const std::int64_t> labels,
                           ReportMetadata metadata = {});

EvalReport evaluate(const Scorer& scorer, const data::DatasetManifest& test,
                    ReportMetadata metadata = {}, std::int64_t chunk = 256);

}  // namespace semaug::evalcls
