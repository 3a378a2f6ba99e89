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

#include "semaug/evalcls/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace semaug::evalcls {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

Spread spread(const std::vector<double>& values) {
  Spread s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

std::string cell(const Spread& s) {
  return fixed4(s.mean) + " [" + fixed4(s.min) + ", " + fixed4(s.max) + "]";
}

}  // namespace

std::vector<ComparisonRow> summarize(const std::vector<RunResult>& runs,
                                     const std::string& classifier) {
  std::vector<ComparisonRow> rows;
  for (auto strategy : {Strategy::None, Strategy::Balanced, Strategy::Ours}) {
    std::vector<double> tp, ap;
    for (const auto& r : runs) {
      if (r.strategy != strategy) continue;
      tp.push_back(r.report.total_precision);
      ap.push_back(r.report.mean_ap);
    }
    if (tp.empty()) continue;
    rows.push_back(ComparisonRow{classifier, strategy, tp.size(), spread(tp), spread(ap)});
  }
  return rows;
}

std::string Comparison::markdown() const {
  std::ostringstream out;
  out << "| classifier | augmentation | Total Precision | mAP |\n";
  out << "|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.classifier << " | " << to_string(r.strategy) << " | "
        << cell(r.total_precision) << " | " << cell(r.mean_ap) << " |\n";
  }
  return out.str();
}

std::string Comparison::csv() const {
  std::ostringstream out;
  std::int64_t classes = runs.empty() ? 0 : runs.front().report.class_count();
  out << "classifier,augmentation,seed,total_precision,mAP";
  for (std::int64_t c = 0; c < classes; ++c) out << ",recall_c" << c;
  out << '\n';
  char buf[64];
  for (const auto& r : runs) {
    out << r.report.metadata.classifier << ',' << to_string(r.strategy) << ',' << r.seed;
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", r.report.total_precision, r.report.mean_ap);
    out << buf;
    for (double v : r.report.per_class_recall()) {
      if (std::isnan(v)) {
        out << ",";
      } else {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

Comparison run_strategy_comparison(const data::DatasetManifest& train,
                                   const data::DatasetManifest& test,
                                   const augment::AugmentedDataset* augmented,
                                   const std::vector<Strategy>& strategies,
                                   const std::vector<std::uint64_t>& seeds,
                                   const ClassifierConfig& base, const RunCallback& on_run) {
  base.validate();
  if (strategies.empty() || seeds.empty()) {
    throw ValidationError("comparison needs at least one strategy and one seed");
  }
  if (test.empty()) throw ValidationError("comparison: empty test set");
  if (test.class_count() != train.class_count() || !(test.image_shape() == train.image_shape())) {
    throw ValidationError("comparison: test set label space or image shape differs from training");
  }
  const bool needs_aug =
      std::find(strategies.begin(), strategies.end(), Strategy::Ours) != strategies.end();
  if (needs_aug && augmented == nullptr) {
    throw ValidationError("comparison: strategy Ours requires an augmented dataset");
  }
  if (augmented != nullptr && augmented->source_fingerprint() != train.fingerprint()) {
    throw ValidationError("comparison: augmented dataset was generated from a different training set");
  }

  Comparison out;
  for (auto seed : seeds) {
    const auto [fit, val] = base.val_fraction > 0.0
                                ? data::stratified_split(train, base.val_fraction, seed)
                                : std::make_pair(train, data::DatasetManifest{});
    for (auto strategy : strategies) {
      auto config = base;
      config.strategy = strategy;
      config.seed = seed;
      TrainingSource source{&fit, strategy == Strategy::Ours ? augmented : nullptr,
                            val.empty() ? nullptr : &val};
      auto trained = train_classifier(source, config);
      ReportMetadata meta{to_string(strategy), seed, std::to_string(test.fingerprint()),
                          config.architecture};
      RunResult run{strategy, seed, evaluate(trained.classifier, test, meta), std::move(trained.log)};
      if (on_run) on_run(run, trained.classifier);
      out.runs.push_back(std::move(run));
    }
  }
  out.rows = summarize(out.runs, base.architecture);
  return out;
}

}  // namespace semaug::evalcls
