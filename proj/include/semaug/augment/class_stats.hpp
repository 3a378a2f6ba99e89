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

#include <Eigen/Dense>

#include "semaug/common.hpp"

namespace semaug::augment {

/// Latent statistics of one class, computed over encoder means.
struct ClassStatsEntry {
  std::int64_t count = 0;
  std::vector<double> mean;
  // Diagonal of the class covariance; >= 0 elementwise.
  std::vector<double> sigma2;
  // True when sigma2 was replaced by the pooled variance (count < 2).
  bool fallback_used = false;
  // Lower Cholesky factor of the full covariance; only populated when
  // full-covariance statistics were requested and the class has >= 2 samples.
  std::optional<Eigen::MatrixXd> cholesky;
};

struct ClassStats {
  std::int64_t dim = 0;
  std::vector<ClassStatsEntry> classes;
  // Pooled within-class diagonal variance used for the fallback.
  std::vector<double> pooled_sigma2;

  const ClassStatsEntry& operator[](std::int64_t c) const {
    return classes.at(static_cast<std::size_t>(c));
  }
  std::int64_t class_count() const { return static_cast<std::int64_t>(classes.size()); }

  std::string to_json() const;
  static ClassStats from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ClassStats load(const std::filesystem::path& path);
};

struct StatsOptions {
  bool full_covariance = false;
};

/// Per-class count, mean and unbiased (n - 1) diagonal variance of the
/// given mean vectors. Classes with fewer than two samples receive the
/// pooled within-class variance sum_c sum_i (x - m_c)^2 / (N - K), where K
/// counts the nonempty classes; when N == K it falls back to the variance
/// of all vectors around their global mean (zero for a single vector).
ClassStats compute_class_stats(std::span<const std::vector<double>> mus,
                               std::span<const std::int64_t> labels, std::int64_t class_count,
                               const StatsOptions& options = {});

enum class CovarianceMode { Diagonal, Full };

/// z' = sqrt(s * sigma2_c) * r + mu with r ~ N(0, I), i.e. a draw from
/// N(mu, s * diag(sigma2_c)). With CovarianceMode::Full and a stored
/// Cholesky factor L, z' = sqrt(s) * L r + mu instead.
std::vector<double> augment_latent(std::span<const double> mu, const ClassStatsEntry& stats,
                                   double strength, Rng& rng,
                                   CovarianceMode mode = CovarianceMode::Diagonal);

}  // namespace semaug::augment
