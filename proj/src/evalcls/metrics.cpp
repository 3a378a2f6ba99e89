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

#include "semaug/evalcls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace semaug::evalcls {

using nlohmann::json;

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> positives) {
  if (scores.size() != positives.size()) {
    throw ValidationError("average_precision: " + std::to_string(scores.size()) + " scores but " +
                          std::to_string(positives.size()) + " labels");
  }
  std::int64_t total_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw ValidationError("average_precision: non-finite score");
    if (positives[i] != 0) ++total_pos;
  }
  if (total_pos == 0) throw ValidationError("average_precision: no positive samples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Recall only moves at positives, by 1/total_pos each time.
  double sum = 0.0;
  std::int64_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (positives[order[k]] == 0) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(total_pos);
}

std::vector<double> EvalReport::per_class_recall() const {
  std::vector<double> out;
  for (std::size_t c = 0; c < confusion.size(); ++c) {
    const auto row = std::accumulate(confusion[c].begin(), confusion[c].end(), std::int64_t{0});
    out.push_back(row == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(confusion[c][c]) / static_cast<double>(row));
  }
  return out;
}

std::string EvalReport::to_json() const {
  json ap = json::array();
  for (const auto& a : per_class_ap) ap.push_back(a ? json(*a) : json(nullptr));
  json recall = json::array();
  for (double r : per_class_recall()) recall.push_back(std::isnan(r) ? json(nullptr) : json(r));
  json j{{"per_class_ap", ap},
         {"mAP", mean_ap},
         {"total_precision", total_precision},
         {"confusion", confusion},
         {"per_class_recall", recall},
         {"excluded_classes", excluded_classes},
         {"ap_definition", ap_definition},
         {"metadata",
          {{"strategy", metadata.strategy},
           {"seed", metadata.seed},
           {"dataset_id", metadata.dataset_id},
           {"classifier", metadata.classifier}}}};
  return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  const auto j = json::parse(text);
  EvalReport r;
  for (const auto& a : j.at("per_class_ap")) {
    r.per_class_ap.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
  }
  r.mean_ap = j.at("mAP").get<double>();
  r.total_precision = j.at("total_precision").get<double>();
  r.confusion = j.at("confusion").get<std::vector<std::vector<std::int64_t>>>();
  r.excluded_classes = j.at("excluded_classes").get<std::vector<std::int64_t>>();
  r.ap_definition = j.at("ap_definition").get<std::string>();
  const auto& m = j.at("metadata");
  r.metadata.strategy = m.at("strategy").get<std::string>();
  r.metadata.seed = m.at("seed").get<std::uint64_t>();
  r.metadata.dataset_id = m.at("dataset_id").get<std::string>();
  r.metadata.classifier = m.at("classifier").get<std::string>();
  return r;
}

EvalReport evaluate_scores(const torch::Tensor& scores, std::span<const std::int64_t> labels,
                           ReportMetadata metadata) {
  if (scores.dim() != 2) throw ValidationError("evaluate: scores must be [N, K]");
  const auto n = scores.size(0);
  const auto k = scores.size(1);
  if (n == 0) throw ValidationError("evaluate: empty test set");
  if (static_cast<std::int64_t>(labels.size()) != n) {
    throw ValidationError("evaluate: " + std::to_string(n) + " score rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  const auto s = scores.to(torch::kFloat64).contiguous();
  const auto* p = s.data_ptr<double>();

  EvalReport report;
  report.metadata = std::move(metadata);
  report.confusion.assign(static_cast<std::size_t>(k), std::vector<std::int64_t>(k, 0));
  std::int64_t correct = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw ValidationError("evaluate: label " + std::to_string(y) + " out of range");
    const auto* row = p + i * k;
    const auto pred = std::max_element(row, row + k) - row;
    ++report.confusion[static_cast<std::size_t>(y)][static_cast<std::size_t>(pred)];
    if (pred == y) ++correct;
  }
  report.total_precision = static_cast<double>(correct) / static_cast<double>(n);

  std::vector<double> column(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> positives(static_cast<std::size_t>(n));
  double ap_sum = 0.0;
  std::int64_t ap_count = 0;
  for (std::int64_t c = 0; c < k; ++c) {
    bool any = false;
    for (std::int64_t i = 0; i < n; ++i) {
      column[static_cast<std::size_t>(i)] = p[i * k + c];
      positives[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] == c;
      any = any || positives[static_cast<std::size_t>(i)];
    }
    if (!any) {
      report.per_class_ap.emplace_back(std::nullopt);
      report.excluded_classes.push_back(c);
      continue;
    }
    const double ap = average_precision(column, positives);
    report.per_class_ap.emplace_back(ap);
    ap_sum += ap;
    ++ap_count;
  }
  report.mean_ap = ap_sum / static_cast<double>(ap_count);
  return report;
}

EvalReport evaluate(const Scorer& scorer, const data::DatasetManifest& test,
                    ReportMetadata metadata, std::int64_t chunk) {
  if (test.empty()) throw ValidationError("evaluate: empty test set");
  if (test.class_count() != scorer.class_count()) {
    throw ValidationError("evaluate: test set has " + std::to_string(test.class_count()) +
                          " classes, classifier has " + std::to_string(scorer.class_count()));
  }
  std::vector<torch::Tensor> parts;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < test.size(); start += static_cast<std::size_t>(chunk)) {
    idx.clear();
    const auto stop = std::min(test.size(), start + static_cast<std::size_t>(chunk));
    for (std::size_t i = start; i < stop; ++i) idx.push_back(i);
    parts.push_back(scorer.predict_scores(test.stack(idx)));
  }
  std::vector<std::int64_t> labels;
  for (const auto& s : test.samples()) labels.push_back(s.label);
  if (metadata.dataset_id.empty()) metadata.dataset_id = std::to_string(test.fingerprint());
  return evaluate_scores(torch::cat(parts), labels, std::move(metadata));
}

}  // namespace semaug::evalcls
