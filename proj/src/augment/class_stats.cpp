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

#include "semaug/augment/class_stats.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace semaug::augment {

using nlohmann::json;

ClassStats compute_class_stats(std::span<const std::vector<double>> mus,
                               std::span<const std::int64_t> labels, std::int64_t class_count,
                               const StatsOptions& options) {
  if (mus.empty()) throw ValidationError("compute_class_stats: no samples");
  if (mus.size() != labels.size()) {
    throw ValidationError("compute_class_stats: mus and labels differ in length");
  }
  if (class_count < 1) throw ValidationError("compute_class_stats: class_count must be >= 1");
  const auto d = mus.front().size();
  if (d == 0) throw ValidationError("compute_class_stats: empty mean vectors");

  ClassStats stats;
  stats.dim = static_cast<std::int64_t>(d);
  stats.classes.resize(static_cast<std::size_t>(class_count));
  // Welford accumulators: running mean and sum of squared deviations.
  std::vector<std::vector<double>> m2(static_cast<std::size_t>(class_count));
  for (auto& e : stats.classes) e.mean.assign(d, 0.0);
  for (auto& m : m2) m.assign(d, 0.0);

  std::vector<double> global_mean(d, 0.0);
  std::vector<double> global_m2(d, 0.0);
  std::int64_t total = 0;

  for (std::size_t i = 0; i < mus.size(); ++i) {
    const auto label = labels[i];
    if (label < 0 || label >= class_count) {
      throw ValidationError("compute_class_stats: label " + std::to_string(label) +
                            " out of range");
    }
    if (mus[i].size() != d) throw ValidationError("compute_class_stats: dimension mismatch");
    auto& e = stats.classes[static_cast<std::size_t>(label)];
    auto& acc = m2[static_cast<std::size_t>(label)];
    ++e.count;
    ++total;
    const double n = static_cast<double>(e.count);
    const double nt = static_cast<double>(total);
    for (std::size_t k = 0; k < d; ++k) {
      const double x = mus[i][k];
      const double delta = x - e.mean[k];
      e.mean[k] += delta / n;
      acc[k] += delta * (x - e.mean[k]);
      const double gdelta = x - global_mean[k];
      global_mean[k] += gdelta / nt;
      global_m2[k] += gdelta * (x - global_mean[k]);
    }
  }

  std::int64_t nonempty = 0;
  std::vector<double> within(d, 0.0);
  for (std::size_t c = 0; c < stats.classes.size(); ++c) {
    if (stats.classes[c].count == 0) continue;
    ++nonempty;
    for (std::size_t k = 0; k < d; ++k) within[k] += m2[c][k];
  }
  stats.pooled_sigma2.assign(d, 0.0);
  if (total > nonempty) {
    for (std::size_t k = 0; k < d; ++k) {
      stats.pooled_sigma2[k] = within[k] / static_cast<double>(total - nonempty);
    }
  } else if (total > 1) {
    for (std::size_t k = 0; k < d; ++k) {
      stats.pooled_sigma2[k] = global_m2[k] / static_cast<double>(total - 1);
    }
  }

  for (std::size_t c = 0; c < stats.classes.size(); ++c) {
    auto& e = stats.classes[c];
    if (e.count >= 2) {
      e.sigma2.resize(d);
      for (std::size_t k = 0; k < d; ++k) {
        e.sigma2[k] = std::max(0.0, m2[c][k] / static_cast<double>(e.count - 1));
      }
    } else {
      e.sigma2 = stats.pooled_sigma2;
      e.fallback_used = true;
    }
  }

  if (options.full_covariance) {
    const auto dd = static_cast<Eigen::Index>(d);
    std::vector<Eigen::MatrixXd> scatter(stats.classes.size(), Eigen::MatrixXd::Zero(dd, dd));
    for (std::size_t i = 0; i < mus.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      Eigen::VectorXd diff(dd);
      for (std::size_t k = 0; k < d; ++k) diff[static_cast<Eigen::Index>(k)] = mus[i][k] - stats.classes[c].mean[k];
      scatter[c].noalias() += diff * diff.transpose();
    }
    for (std::size_t c = 0; c < stats.classes.size(); ++c) {
      auto& e = stats.classes[c];
      if (e.count < 2) continue;
      Eigen::MatrixXd cov = scatter[c] / static_cast<double>(e.count - 1);
      // Small classes give rank-deficient covariances; a relative ridge keeps
      // the factorization defined without visibly changing the spread.
      const double ridge = 1e-9 * std::max(cov.trace() / static_cast<double>(d), 1e-12);
      cov.diagonal().array() += ridge;
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() == Eigen::Success) e.cholesky = Eigen::MatrixXd(llt.matrixL());
    }
  }
  return stats;
}

std::vector<double> augment_latent(std::span<const double> mu, const ClassStatsEntry& stats,
                                   double strength, Rng& rng, CovarianceMode mode) {
  if (!(strength >= 0.0)) throw ValidationError("augment_latent: strength must be >= 0");
  if (mu.size() != stats.sigma2.size()) {
    throw ValidationError("augment_latent: dimension mismatch");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(mu.begin(), mu.end());
  if (mode == CovarianceMode::Full && stats.cholesky) {
    const auto d = static_cast<Eigen::Index>(mu.size());
    Eigen::VectorXd r(d);
    for (Eigen::Index k = 0; k < d; ++k) r[k] = normal(rng);
    const Eigen::VectorXd step = std::sqrt(strength) * (*stats.cholesky) * r;
    for (Eigen::Index k = 0; k < d; ++k) out[static_cast<std::size_t>(k)] += step[k];
    return out;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double r = normal(rng);
    out[k] += std::sqrt(strength * stats.sigma2[k]) * r;
  }
  return out;
}

std::string ClassStats::to_json() const {
  json j{{"dim", dim}, {"pooled_sigma2", pooled_sigma2}, {"classes", json::array()}};
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& e = classes[c];
    j["classes"].push_back({{"class", c},
                            {"n", e.count},
                            {"mean", e.mean},
                            {"sigma2", e.sigma2},
                            {"fallback_used", e.fallback_used}});
  }
  return j.dump(2);
}

ClassStats ClassStats::from_json(const std::string& text) {
  const auto j = json::parse(text);
  ClassStats s;
  s.dim = j.at("dim").get<std::int64_t>();
  s.pooled_sigma2 = j.at("pooled_sigma2").get<std::vector<double>>();
  for (const auto& c : j.at("classes")) {
    ClassStatsEntry e;
    e.count = c.at("n").get<std::int64_t>();
    e.mean = c.at("mean").get<std::vector<double>>();
    e.sigma2 = c.at("sigma2").get<std::vector<double>>();
    e.fallback_used = c.at("fallback_used").get<bool>();
    s.classes.push_back(std::move(e));
  }
  return s;
}

void ClassStats::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write stats file '" + path.string() + "'");
  out << to_json() << '\n';
}

ClassStats ClassStats::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("cannot read stats file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace semaug::augment
