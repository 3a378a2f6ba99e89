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

#include "semaug/augment/synthesis.hpp"

#include <fstream>

#include "json.hpp"
#include "semaug/image_io.hpp"

namespace semaug::augment {

namespace fs = std::filesystem;
using nlohmann::json;

AugmentPlan AugmentPlan::balanced(std::span<const std::int64_t> histogram, double strength,
                                  double augment_ratio, std::uint64_t seed) {
  AugmentPlan plan;
  plan.strength = strength;
  plan.augment_ratio = augment_ratio;
  plan.seed = seed;
  const auto top = histogram.empty() ? 0 : *std::max_element(histogram.begin(), histogram.end());
  plan.targets.assign(histogram.size(), top);
  return plan;
}

void AugmentPlan::validate(std::span<const std::int64_t> histogram) const {
  if (!(strength >= 0.0)) throw ValidationError("augment plan: strength must be >= 0");
  if (!(augment_ratio >= 0.0 && augment_ratio <= 1.0)) {
    throw ValidationError("augment plan: augment_ratio must lie in [0, 1]");
  }
  if (targets.size() != histogram.size()) {
    throw ValidationError("augment plan: expected " + std::to_string(histogram.size()) +
                          " per-class targets, got " + std::to_string(targets.size()));
  }
  for (std::size_t c = 0; c < targets.size(); ++c) {
    if (targets[c] < histogram[c]) {
      throw ValidationError("augment plan: target for class " + std::to_string(c) +
                            " is below its current count");
    }
    if (targets[c] > histogram[c] && histogram[c] == 0) {
      throw ValidationError("augment plan: class " + std::to_string(c) +
                            " has no source samples to augment");
    }
  }
}

AugmentedDataset::AugmentedDataset(std::uint64_t source_fingerprint, std::int64_t class_count,
                                   double strength, std::vector<GeneratedSample> samples)
    : source_fingerprint_(source_fingerprint),
      class_count_(class_count),
      strength_(strength),
      samples_(std::move(samples)),
      by_class_(static_cast<std::size_t>(class_count)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto label = samples_[i].label;
    if (label < 0 || label >= class_count_) {
      throw ValidationError("generated sample '" + samples_[i].id + "' has an invalid label");
    }
    by_class_[static_cast<std::size_t>(label)].push_back(i);
  }
}

std::vector<std::int64_t> AugmentedDataset::histogram() const {
  std::vector<std::int64_t> hist;
  for (const auto& members : by_class_) hist.push_back(static_cast<std::int64_t>(members.size()));
  return hist;
}

std::vector<std::vector<double>> encode_means(const vaegan::VaeGan& model,
                                              const data::DatasetManifest& manifest,
                                              std::int64_t chunk) {
  std::vector<std::vector<double>> out;
  out.reserve(manifest.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < manifest.size(); start += static_cast<std::size_t>(chunk)) {
    idx.clear();
    for (std::size_t i = start; i < std::min(manifest.size(), start + static_cast<std::size_t>(chunk)); ++i) {
      idx.push_back(i);
    }
    const auto mu = model.encode(manifest.stack(idx)).mu.to(torch::kFloat64).contiguous();
    for (std::int64_t r = 0; r < mu.size(0); ++r) {
      const auto* p = mu[r].data_ptr<double>();
      out.emplace_back(p, p + mu.size(1));
    }
  }
  return out;
}

ClassStats class_stats_for(const vaegan::VaeGan& model, const data::DatasetManifest& manifest,
                           const StatsOptions& options) {
  const auto mus = encode_means(model, manifest);
  std::vector<std::int64_t> labels;
  for (const auto& s : manifest.samples()) labels.push_back(s.label);
  return compute_class_stats(mus, labels, manifest.class_count(), options);
}

AugmentedDataset synthesize_balanced(const data::DatasetManifest& manifest,
                                     const vaegan::VaeGan& model, const ClassStats& stats,
                                     const AugmentPlan& plan) {
  plan.validate(manifest.histogram());
  if (stats.class_count() != manifest.class_count()) {
    throw ValidationError("synthesize_balanced: stats cover " +
                          std::to_string(stats.class_count()) + " classes, manifest has " +
                          std::to_string(manifest.class_count()));
  }
  if (stats.dim != model.config().latent_dim) {
    throw ValidationError("synthesize_balanced: stats dimension differs from the model's");
  }

  std::vector<GeneratedSample> generated;
  for (std::int64_t c = 0; c < manifest.class_count(); ++c) {
    const auto need = plan.targets[static_cast<std::size_t>(c)] -
                      manifest.histogram()[static_cast<std::size_t>(c)];
    if (need <= 0) continue;
    const auto& members = manifest.class_indices(c);
    // Per-sample encoding keeps each mean independent of batch grouping.
    std::vector<torch::Tensor> rows;
    for (auto i : members) rows.push_back(model.encode(manifest[i].image.unsqueeze(0)).mu);
    const auto mu = torch::cat(rows).to(torch::kFloat64).contiguous();
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::int64_t k = 0; k < need; ++k) {
      const auto stream = derive_seed(plan.seed, static_cast<std::uint64_t>(c),
                                      static_cast<std::uint64_t>(k));
      Rng rng(stream);
      const auto m = pick(rng);
      const auto* p = mu[static_cast<std::int64_t>(m)].data_ptr<double>();
      const std::vector<double> source(p, p + mu.size(1));
      const auto z = augment_latent(source, stats[c], plan.strength, rng, plan.covariance);

      GeneratedSample g;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "gen-c%02lld-%05lld", static_cast<long long>(c),
                    static_cast<long long>(k));
      g.id = buf;
      g.label = c;
      g.source_id = manifest[members[m]].id;
      g.latent.assign(z.begin(), z.end());
      g.stream_seed = stream;
      generated.push_back(std::move(g));
    }
  }

  // One latent per decode call, for the same reason.
  for (auto& g : generated) {
    const auto z = torch::tensor(g.latent).unsqueeze(0);
    g.image = model.decode(z).squeeze(0).to(torch::kFloat32).contiguous();
  }
  return AugmentedDataset(manifest.fingerprint(), manifest.class_count(), plan.strength,
                          std::move(generated));
}

fs::path save_augmented(const AugmentedDataset& augmented, const data::DatasetManifest& originals,
                        const fs::path& dir) {
  if (augmented.source_fingerprint() != originals.fingerprint()) {
    throw ValidationError("augmented dataset was not generated from this manifest");
  }
  const auto image_dir = dir / "images";
  fs::create_directories(image_dir);
  const auto manifest_path = dir / "augmented.jsonl";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write '" + manifest_path.string() + "'");
  const auto& shape = originals.image_shape();
  json header{{"class_count", originals.class_count()},
              {"image_shape", {shape.channels, shape.height, shape.width}},
              {"source_fingerprint", std::to_string(augmented.source_fingerprint())},
              {"strength", augmented.strength()}};
  if (!originals.class_names().empty()) header["class_names"] = originals.class_names();
  out << header.dump() << '\n';
  for (const auto& g : augmented.samples()) {
    const auto file = image_dir / (g.id + ".png");
    image_io::write_png(file, g.image);
    json line{{"id", g.id},
              {"path", (fs::path("images") / (g.id + ".png")).generic_string()},
              {"label", g.label},
              {"source_id", g.source_id},
              {"generated", true},
              {"strength", augmented.strength()},
              {"stream_seed", std::to_string(g.stream_seed)}};
    out << line.dump() << '\n';
  }
  return manifest_path;
}

AugmentedDataset load_augmented(const fs::path& manifest_path,
                                const data::DatasetManifest& originals) {
  const auto images = data::load_manifest(manifest_path);
  if (images.class_count() != originals.class_count() ||
      !(images.image_shape() == originals.image_shape())) {
    throw ValidationError("augmented manifest does not match the original label space");
  }
  std::ifstream in(manifest_path);
  std::string text;
  std::getline(in, text);
  const auto header = json::parse(text);
  if (header.contains("source_fingerprint") &&
      header.at("source_fingerprint").get<std::string>() !=
          std::to_string(originals.fingerprint())) {
    throw ValidationError("augmented manifest '" + manifest_path.string() +
                          "' was generated from a different dataset");
  }
  const double strength = header.value("strength", 0.0);

  std::vector<GeneratedSample> samples;
  std::size_t i = 0;
  while (std::getline(in, text)) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto line = json::parse(text);
    const auto& s = images[i++];
    GeneratedSample g;
    g.id = s.id;
    g.label = s.label;
    g.source_id = line.value("source_id", "");
    g.image = s.image;
    if (line.contains("stream_seed")) g.stream_seed = std::stoull(line.at("stream_seed").get<std::string>());
    samples.push_back(std::move(g));
  }
  return AugmentedDataset(originals.fingerprint(), originals.class_count(), strength,
                          std::move(samples));
}

}  // namespace semaug::augment
