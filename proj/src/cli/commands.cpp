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

#include "semaug/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "semaug/augment/class_stats.hpp"
#include "semaug/augment/synthesis.hpp"
#include "semaug/data.hpp"
#include "semaug/evalcls/comparison.hpp"
#include "semaug/image_io.hpp"
#include "semaug/vaegan/model.hpp"

#ifndef SEMAUG_VERSION
#define SEMAUG_VERSION "unknown"
#endif

namespace semaug::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return SEMAUG_VERSION; }

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& flag, const std::string& what) {
    throw ValidationError(flag + " " + what);
  };
  if (out.empty()) fail("--out", "must not be empty");
  if (data.classes < 2) fail("--classes", "must be >= 2");
  if (data.head < 1) fail("--head", "must be >= 1");
  if (data.tail < 1 || data.tail > data.head) fail("--tail", "must lie in [1, head]");
  if (!(data.decay > 0.0 && data.decay <= 1.0)) {
    fail("--decay", "must lie in (0, 1], got " + std::to_string(data.decay));
  }
  if (data.image_size < 8) fail("--image-size", "must be >= 8");
  if (data.test_per_class < 1) fail("--test-per-class", "must be >= 1");
  if (vaegan.latent_dim < 1) fail("--latent-dim", "must be >= 1");
  if (vaegan.base_channels < 1) fail("--base-channels", "must be >= 1");
  if (!(vaegan.beta_max >= 0.0)) fail("--beta-max", "must be >= 0");
  if (!(vaegan.lambda_p >= 0.0)) fail("--lambda-p", "must be >= 0");
  if (!(vaegan.adv_weight >= 0.0)) fail("--adv-weight", "must be >= 0");
  if (!(vaegan.lr_eg > 0.0)) fail("--lr-eg", "must be > 0");
  if (!(vaegan.lr_d > 0.0)) fail("--lr-d", "must be > 0");
  if (vaegan.batch_size < 1) fail("--vae-batch-size", "must be >= 1");
  if (vaegan.total_steps < 1) fail("--steps", "must be >= 1");
  if (!(augment.strength >= 0.0)) fail("--strength", "must be >= 0");
  if (!(augment.ratio >= 0.0 && augment.ratio <= 1.0)) fail("--augment-ratio", "must lie in [0, 1]");
  if (augment.covariance != "diagonal" && augment.covariance != "full") {
    fail("--covariance", "must be 'diagonal' or 'full'");
  }
  if (augment.grid_k < 1) fail("--grid-k", "must be >= 1");
  if (classifier.width < 1) fail("--width", "must be >= 1");
  if (classifier.blocks_per_stage < 1) fail("--blocks", "must be >= 1");
  if (classifier.epochs < 1) fail("--epochs", "must be >= 1");
  if (classifier.batch_size < 1) fail("--cls-batch-size", "must be >= 1");
  if (!(classifier.lr > 0.0)) fail("--lr", "must be > 0");
  if (!(classifier.weight_decay >= 0.0)) fail("--weight-decay", "must be >= 0");
  if (classifier.original_only_tail < 0 || classifier.original_only_tail > classifier.epochs) {
    fail("--tail-epochs", "must lie in [0, epochs]");
  }
  if (!(classifier.val_fraction >= 0.0 && classifier.val_fraction < 1.0)) {
    fail("--val-fraction", "must lie in [0, 1)");
  }
  if (strategies.empty()) fail("--strategies", "must name at least one strategy");
  for (const auto& s : strategies) {
    try {
      evalcls::parse_strategy(s);
    } catch (const ValidationError& e) {
      fail("--strategies", e.what());
    }
  }
  classifier.validate();
}

std::string ExperimentConfig::to_json() const {
  json j{{"seed", seed},
         {"out", out.generic_string()},
         {"data",
          {{"train-manifest", data.train_manifest},
           {"test-manifest", data.test_manifest},
           {"classes", data.classes},
           {"head", data.head},
           {"tail", data.tail},
           {"decay", data.decay},
           {"image-size", data.image_size},
           {"test-per-class", data.test_per_class}}},
         {"vaegan", json::parse(vaegan.to_json())},
         {"checkpoint", checkpoint},
         {"augment",
          {{"strength", augment.strength},
           {"augment-ratio", augment.ratio},
           {"covariance", augment.covariance},
           {"grid-k", augment.grid_k},
           {"augmented", augment.augmented}}},
         {"classifier", json::parse(classifier.to_json())},
         {"strategies", strategies},
         {"seeds", run_seeds()}};
  return j.dump();
}

fs::path ExperimentConfig::train_manifest_path() const {
  return data.train_manifest.empty() ? out / "data" / "train" / "manifest.jsonl"
                                     : fs::path(data.train_manifest);
}

fs::path ExperimentConfig::test_manifest_path() const {
  return data.test_manifest.empty() ? out / "data" / "test" / "manifest.jsonl"
                                    : fs::path(data.test_manifest);
}

fs::path ExperimentConfig::checkpoint_path() const {
  return checkpoint.empty() ? out / "vaegan" / "model.pt" : fs::path(checkpoint);
}

fs::path ExperimentConfig::augmented_path() const {
  return augment.augmented.empty() ? out / "augment" / "augmented.jsonl"
                                   : fs::path(augment.augmented);
}

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
  if (!seeds.empty()) return seeds;
  return {seed, seed + 1, seed + 2};
}

void RunArtifacts::merge(const RunArtifacts& other) {
  for (const auto& [k, v] : other.paths) paths[k] = v;
  for (const auto& [k, v] : other.metrics) metrics[k] = v;
}

namespace {

data::DatasetManifest load_required(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw RuntimeFailure(what + " '" + path.string() + "' does not exist");
  return data::load_manifest(path);
}

void log_line(const std::string& text) { std::cerr << "[semaug] " << text << std::endl; }

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write '" + path.string() + "'");
  out << text;
}

vaegan::VaeGanConfig resolved_vaegan(const ExperimentConfig& config, const ImageShape& shape) {
  auto v = config.vaegan;
  v.image_shape = shape;
  v.seed = config.seed;
  return v;
}

// Up to `per_class` samples of every class, in manifest order.
std::vector<std::size_t> probe_indices(const data::DatasetManifest& m, std::size_t per_class) {
  std::vector<std::size_t> out;
  for (std::int64_t c = 0; c < m.class_count(); ++c) {
    const auto& members = m.class_indices(c);
    for (std::size_t i = 0; i < std::min(per_class, members.size()); ++i) out.push_back(members[i]);
  }
  return out;
}

std::vector<double> mean_of(const vaegan::VaeGan& model, const torch::Tensor& image) {
  const auto mu = model.encode(image.unsqueeze(0)).mu.to(torch::kFloat64).contiguous();
  const auto* p = mu.data_ptr<double>();
  return {p, p + mu.size(1)};
}

torch::Tensor decode_one(const vaegan::VaeGan& model, const std::vector<double>& z) {
  return model.decode(torch::tensor(z).unsqueeze(0)).squeeze(0).to(torch::kFloat32);
}

}  // namespace

RunArtifacts cmd_gen_data(const ExperimentConfig& config) {
  config.validate();
  const ImageShape shape{3, config.data.image_size, config.data.image_size};
  data::SyntheticSpec spec{config.data.classes, config.data.head, config.data.tail,
                           config.data.decay, shape, config.seed, "train"};
  const auto train = data::make_longtail_synthetic(spec);
  const std::vector<std::int64_t> test_counts(static_cast<std::size_t>(config.data.classes),
                                              config.data.test_per_class);
  const auto test =
      data::make_synthetic_with_counts(test_counts, shape, derive_seed(config.seed, 0x7e57), "test");

  RunArtifacts art;
  const auto root = config.out / "data";
  const auto train_path = root / "train" / "manifest.jsonl";
  const auto test_path = root / "test" / "manifest.jsonl";
  data::save_manifest(train, train_path, root / "train" / "images");
  data::save_manifest(test, test_path, root / "test" / "images");
  art.paths["train_manifest"] = train_path;
  art.paths["test_manifest"] = test_path;
  const auto& hist = train.histogram();
  for (std::size_t c = 0; c < hist.size(); ++c) {
    art.metrics["train_count_c" + std::to_string(c)] = static_cast<double>(hist[c]);
  }
  art.metrics["train_size"] = static_cast<double>(train.size());
  art.metrics["test_size"] = static_cast<double>(test.size());
  log_line("gen-data: " + std::to_string(train.size()) + " train, " +
           std::to_string(test.size()) + " test samples");
  return art;
}

RunArtifacts cmd_train_vaegan(const ExperimentConfig& config) {
  config.validate();
  const auto train = load_required(config.train_manifest_path(), "training manifest");
  const auto vcfg = resolved_vaegan(config, train.image_shape());
  const auto test_path = config.test_manifest_path();
  const auto probe_set = fs::exists(test_path) ? data::load_manifest(test_path) : train;
  const auto probe = probe_set.stack(probe_indices(probe_set, 10));

  const vaegan::VaeGan untrained(vcfg);
  const double before = vaegan::reconstruction_l1(untrained, probe);
  log_line("train-vaegan: " + std::to_string(vcfg.total_steps) + " steps on " +
           std::to_string(train.size()) + " samples");
  auto trained = vaegan::train_vaegan(train, vcfg, nullptr, [&](const vaegan::LossRecord& r) {
    if ((r.step + 1) % 100 == 0 || r.step + 1 == vcfg.total_steps) {
      std::ostringstream s;
      s << "  step " << r.step + 1 << "/" << vcfg.total_steps << " d=" << r.d_loss
        << " g=" << r.g_adv_loss << " l1=" << r.recon_l1 << " kld=" << r.kld;
      log_line(s.str());
    }
  });
  const double after = vaegan::reconstruction_l1(trained.model, probe);

  RunArtifacts art;
  const auto dir = config.out / "vaegan";
  fs::create_directories(dir);
  art.paths["vaegan_checkpoint"] = dir / "model.pt";
  art.paths["loss_log"] = dir / "loss_log.csv";
  art.paths["reconstruction_grid"] = dir / "reconstructions.png";
  trained.model.save(art.paths["vaegan_checkpoint"]);
  vaegan::write_loss_log(trained.log, art.paths["loss_log"]);

  // Pairs of (input, reconstruction), four per class row.
  const auto shown = probe_indices(probe_set, 4);
  const auto recon = trained.model.reconstruct(probe_set.stack(shown));
  std::vector<torch::Tensor> tiles;
  for (std::size_t i = 0; i < shown.size(); ++i) {
    tiles.push_back(probe_set[shown[i]].image);
    tiles.push_back(recon[static_cast<std::int64_t>(i)]);
  }
  const auto& s = probe_set.image_shape();
  const std::int64_t cols = 8;
  const image_io::GridGeometry geom{(static_cast<std::int64_t>(tiles.size()) + cols - 1) / cols,
                                    cols, s.height, s.width};
  image_io::write_png(art.paths["reconstruction_grid"], image_io::make_grid(tiles, geom));

  art.metrics["probe_l1_untrained"] = before;
  art.metrics["probe_l1_trained"] = after;
  art.metrics["probe_l1_ratio"] = after / before;
  log_line("train-vaegan: probe L1 " + std::to_string(before) + " -> " + std::to_string(after));
  return art;
}

RunArtifacts cmd_augment(const ExperimentConfig& config) {
  config.validate();
  const auto train = load_required(config.train_manifest_path(), "training manifest");
  const auto ckpt = config.checkpoint_path();
  if (!fs::exists(ckpt)) throw RuntimeFailure("checkpoint '" + ckpt.string() + "' does not exist");
  const auto model = vaegan::VaeGan::load(ckpt);
  if (!(model.config().image_shape == train.image_shape())) {
    throw ValidationError("checkpoint was trained on " + model.config().image_shape.to_string() +
                          " images, manifest holds " + train.image_shape().to_string());
  }
  const bool full = config.augment.covariance == "full";
  const auto mode = full ? augment::CovarianceMode::Full : augment::CovarianceMode::Diagonal;
  const auto stats = augment::class_stats_for(model, train, augment::StatsOptions{full});
  auto plan = augment::AugmentPlan::balanced(train.histogram(), config.augment.strength,
                                             config.augment.ratio,
                                             derive_seed(config.seed, 0xa06));
  plan.covariance = mode;
  const auto aug = augment::synthesize_balanced(train, model, stats, plan);

  RunArtifacts art;
  const auto dir = config.out / "augment";
  fs::create_directories(dir);
  art.paths["class_stats"] = dir / "class_stats.json";
  stats.save(art.paths["class_stats"]);
  art.paths["augmented_manifest"] = augment::save_augmented(aug, train, dir);

  // Source grid: each row is one source image followed by k augmentations.
  // Class grid: each row holds k augmentations of random sources of one class.
  const auto k = config.augment.grid_k;
  Rng pick_rng(derive_seed(config.seed, 0xf14));
  std::vector<torch::Tensor> source_tiles, class_tiles;
  std::int64_t rows = 0;
  for (std::int64_t c = 0; c < train.class_count(); ++c) {
    const auto& members = train.class_indices(c);
    if (members.empty()) continue;
    ++rows;
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const auto& src = train[members[pick(pick_rng)]].image;
    source_tiles.push_back(src);
    const auto mu = mean_of(model, src);
    for (std::int64_t j = 0; j < k; ++j) {
      Rng rng(derive_seed(config.seed, 0xf14 + 1 + static_cast<std::uint64_t>(c),
                          static_cast<std::uint64_t>(j)));
      source_tiles.push_back(decode_one(model, augment::augment_latent(mu, stats[c], plan.strength, rng, mode)));
    }
    for (std::int64_t j = 0; j < k; ++j) {
      Rng rng(derive_seed(config.seed, 0xf15 + 1 + static_cast<std::uint64_t>(c),
                          static_cast<std::uint64_t>(j)));
      std::uniform_int_distribution<std::size_t> any(0, members.size() - 1);
      const auto other = mean_of(model, train[members[any(rng)]].image);
      class_tiles.push_back(decode_one(model, augment::augment_latent(other, stats[c], plan.strength, rng, mode)));
    }
  }
  const auto& s = train.image_shape();
  art.paths["grid_sources"] = dir / "grid_sources.png";
  art.paths["grid_classes"] = dir / "grid_classes.png";
  image_io::write_png(art.paths["grid_sources"],
                      image_io::make_grid(source_tiles, {rows, k + 1, s.height, s.width}));
  image_io::write_png(art.paths["grid_classes"],
                      image_io::make_grid(class_tiles, {rows, k, s.height, s.width}));

  const auto gen_hist = aug.histogram();
  for (std::size_t c = 0; c < gen_hist.size(); ++c) {
    art.metrics["combined_count_c" + std::to_string(c)] =
        static_cast<double>(gen_hist[c] + train.histogram()[c]);
  }
  art.metrics["generated"] = static_cast<double>(aug.size());
  log_line("augment: generated " + std::to_string(aug.size()) + " samples at strength " +
           std::to_string(plan.strength));
  return art;
}

RunArtifacts cmd_compare(const ExperimentConfig& config) {
  config.validate();
  const auto train = load_required(config.train_manifest_path(), "training manifest");
  const auto test = load_required(config.test_manifest_path(), "test manifest");
  std::vector<evalcls::Strategy> strategies;
  for (const auto& s : config.strategies) strategies.push_back(evalcls::parse_strategy(s));
  std::optional<augment::AugmentedDataset> aug;
  if (std::find(strategies.begin(), strategies.end(), evalcls::Strategy::Ours) != strategies.end()) {
    const auto path = config.augmented_path();
    if (!fs::exists(path)) throw RuntimeFailure("augmented manifest '" + path.string() + "' does not exist");
    aug = augment::load_augmented(path, train);
  }

  RunArtifacts art;
  const auto dir = config.out / "compare";
  fs::create_directories(dir / "reports");
  fs::create_directories(dir / "classifiers");
  auto base = config.classifier;
  base.augment_ratio = config.augment.ratio;
  const auto result = evalcls::run_strategy_comparison(
      train, test, aug ? &*aug : nullptr, strategies, config.run_seeds(), base,
      [&](const evalcls::RunResult& run, const evalcls::Classifier& classifier) {
        const auto name = evalcls::to_string(run.strategy) + "_seed" + std::to_string(run.seed);
        const auto report_path = dir / "reports" / (name + ".json");
        const auto model_path = dir / "classifiers" / (name + ".pt");
        const auto log_path = dir / "reports" / (name + "_epochs.csv");
        write_text(report_path, run.report.to_json());
        classifier.save(model_path);
        std::ostringstream log;
        log << "epoch,mode,train_loss,val_accuracy\n";
        for (const auto& e : run.log) {
          log << e.epoch << ',' << e.mode << ',' << e.train_loss << ',' << e.val_accuracy << '\n';
        }
        write_text(log_path, log.str());
        art.paths["report_" + name] = report_path;
        art.paths["classifier_" + name] = model_path;
        art.paths["epochs_" + name] = log_path;
        log_line("compare: " + name + " total_precision=" +
                 std::to_string(run.report.total_precision) +
                 " mAP=" + std::to_string(run.report.mean_ap));
      });
  art.paths["table_markdown"] = dir / "table.md";
  art.paths["runs_csv"] = dir / "runs.csv";
  write_text(art.paths["table_markdown"], result.markdown());
  write_text(art.paths["runs_csv"], result.csv());
  for (const auto& row : result.rows) {
    const auto key = evalcls::to_string(row.strategy);
    art.metrics["mAP_mean_" + key] = row.mean_ap.mean;
    art.metrics["total_precision_mean_" + key] = row.total_precision.mean;
  }
  std::cout << result.markdown();
  return art;
}

RunArtifacts cmd_all(const ExperimentConfig& config) {
  config.validate();
  RunArtifacts art;
  if (config.data.train_manifest.empty()) art.merge(cmd_gen_data(config));
  art.merge(cmd_train_vaegan(config));
  art.merge(cmd_augment(config));
  art.merge(cmd_compare(config));
  return art;
}

fs::path write_run_summary(const std::string& command, const ExperimentConfig& config,
                           const RunArtifacts& artifacts) {
  json paths = json::object();
  for (const auto& [k, v] : artifacts.paths) {
    if (!fs::exists(v)) throw RuntimeFailure("artifact '" + v.string() + "' is missing");
    paths[k] = v.generic_string();
  }
  const auto resolved = config.to_json();
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(fnv1a(resolved)));
  json j{{"command", command},
         {"version", version()},
         {"config", json::parse(resolved)},
         {"config_hash", hash},
         {"artifacts", paths},
         {"metrics", artifacts.metrics}};
  const auto path = config.out / "run_summary.json";
  write_text(path, j.dump(2) + "\n");
  return path;
}

namespace {

struct Binding {
  std::string key;
  CLI::Option* option;
};

// Config keys are "<section>.<flag name>" or a bare flag name at top level.
class Registry {
 public:
  explicit Registry(ExperimentConfig& c) : c_(c) {}

  void top(CLI::App* app) {
    add(app, "", "seed", &c_.seed, "Global seed")->envname("SEMAUG_SEED");
    add(app, "", "out", &c_.out, "Output directory");
  }
  void data_paths(CLI::App* app) {
    add(app, "data", "train-manifest", &c_.data.train_manifest, "Training manifest (default <out>/data/train)");
    add(app, "data", "test-manifest", &c_.data.test_manifest, "Test manifest (default <out>/data/test)");
  }
  void data_gen(CLI::App* app) {
    add(app, "data", "classes", &c_.data.classes, "Number of classes");
    add(app, "data", "head", &c_.data.head, "Largest class count");
    add(app, "data", "tail", &c_.data.tail, "Smallest class count");
    add(app, "data", "decay", &c_.data.decay, "Per-class count decay in (0, 1]");
    add(app, "data", "image-size", &c_.data.image_size, "Square image side");
    add(app, "data", "test-per-class", &c_.data.test_per_class, "Test samples per class");
  }
  void vaegan(CLI::App* app) {
    auto& v = c_.vaegan;
    add(app, "vaegan", "latent-dim", &v.latent_dim, "Latent dimension d");
    add(app, "vaegan", "base-channels", &v.base_channels, "Width of the first conv stage");
    add(app, "vaegan", "beta-max", &v.beta_max, "Peak KL weight");
    add(app, "vaegan", "lambda-p", &v.lambda_p, "Perceptual loss weight");
    add(app, "vaegan", "adv-weight", &v.adv_weight, "Generator hinge weight");
    add(app, "vaegan", "lr-eg", &v.lr_eg, "Encoder/generator learning rate");
    add(app, "vaegan", "lr-d", &v.lr_d, "Discriminator learning rate");
    add(app, "vaegan", "vae-batch-size", &v.batch_size, "VAE-GAN batch size");
    add(app, "vaegan", "steps", &v.total_steps, "VAE-GAN training steps");
  }
  void checkpoint(CLI::App* app) {
    add(app, "vaegan", "checkpoint", &c_.checkpoint, "VAE-GAN checkpoint (default <out>/vaegan/model.pt)");
  }
  void augment(CLI::App* app) {
    add(app, "augment", "strength", &c_.augment.strength, "Augmentation strength s");
    add(app, "augment", "covariance", &c_.augment.covariance, "diagonal or full");
    add(app, "augment", "grid-k", &c_.augment.grid_k, "Augmentations per grid row");
  }
  void ratio(CLI::App* app) {
    add(app, "augment", "augment-ratio", &c_.augment.ratio, "Share of generated samples served");
  }
  void augmented(CLI::App* app) {
    add(app, "augment", "augmented", &c_.augment.augmented, "Augmented manifest (default <out>/augment)");
  }
  void classifier(CLI::App* app) {
    auto& k = c_.classifier;
    add(app, "classifier", "architecture", &k.architecture, "Classifier network");
    add(app, "classifier", "width", &k.width, "Classifier base width");
    add(app, "classifier", "blocks", &k.blocks_per_stage, "Residual blocks per stage");
    add(app, "classifier", "epochs", &k.epochs, "Classifier epochs");
    add(app, "classifier", "cls-batch-size", &k.batch_size, "Classifier batch size");
    add(app, "classifier", "lr", &k.lr, "Classifier learning rate");
    add(app, "classifier", "weight-decay", &k.weight_decay, "Adam weight decay");
    add(app, "classifier", "schedule", &schedule_, "cosine or constant");
    add(app, "classifier", "tail-epochs", &k.original_only_tail, "Final epochs on originals only");
    add(app, "classifier", "val-fraction", &k.val_fraction, "Validation share of training data");
    add(app, "classifier", "strategies", &c_.strategies, "Comma-separated: none,balanced,ours")
        ->delimiter(',');
    add(app, "classifier", "seeds", &c_.seeds, "Comma-separated classifier seeds")->delimiter(',');
  }

  // Applies config-file items as defaults of the options bound on `app`.
  void apply_config(const fs::path& path, CLI::App* app) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--config: cannot read '" + path.string() + "'");
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
      throw ValidationError("--config: " + std::string(e.what()));
    }
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--") continue;
      std::string key;
      for (const auto& p : item.parents) key += p + ".";
      key += item.name;
      if (known_.count(key) == 0) throw ValidationError("--config: unknown key '" + key + "'");
      for (const auto& b : bindings_[app]) {
        if (b.key != key) continue;
        try {
          if (item.inputs.size() == 1) {
            b.option->default_val(item.inputs.front());
          } else {
            b.option->default_val(item.inputs);
          }
        } catch (const CLI::Error& e) {
          throw ValidationError("--config: key '" + key + "': " + e.what());
        }
      }
    }
  }

  void finish() {
    c_.classifier.schedule =
        schedule_ == "constant" ? evalcls::LrSchedule::Constant : evalcls::LrSchedule::Cosine;
    if (schedule_ != "constant" && schedule_ != "cosine") {
      throw ValidationError("--schedule must be 'cosine' or 'constant'");
    }
  }

 private:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& section, const std::string& name, T* target,
                   const std::string& help) {
    auto* opt = app->add_option("--" + name, *target, help)->capture_default_str();
    const auto key = section.empty() ? name : section + "." + name;
    known_.insert(key);
    bindings_[app].push_back(Binding{key, opt});
    return opt;
  }

  ExperimentConfig& c_;
  std::string schedule_ = "cosine";
  std::set<std::string> known_;
  std::map<CLI::App*, std::vector<Binding>> bindings_;
};

std::optional<std::string> find_config(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw ValidationError("--config needs a file argument");
      return std::string(argv[i + 1]);
    }
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

}  // namespace

int run(int argc, const char* const* argv) {
  ExperimentConfig config;
  Registry reg(config);
  CLI::App app{"Latent-space semantic augmentation for long-tailed classification", "semaug"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  std::string config_file;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic long-tailed train/test sets");
  auto* train = app.add_subcommand("train-vaegan", "Train the VAE-GAN");
  auto* aug = app.add_subcommand("augment", "Compute class statistics and synthesize the balanced set");
  auto* cmp = app.add_subcommand("compare", "Train and evaluate classifiers per strategy and seed");
  auto* all = app.add_subcommand("all", "gen-data, train-vaegan, augment and compare in sequence");
  for (auto* sub : {gen, train, aug, cmp, all}) {
    sub->add_option("--config", config_file, "TOML config file");
    reg.top(sub);
  }
  for (auto* sub : {gen, all}) reg.data_gen(sub);
  for (auto* sub : {train, aug, cmp, all}) reg.data_paths(sub);
  for (auto* sub : {train, all}) reg.vaegan(sub);
  for (auto* sub : {aug, all}) {
    reg.checkpoint(sub);
    reg.augment(sub);
  }
  for (auto* sub : {aug, cmp, all}) reg.ratio(sub);
  for (auto* sub : {cmp, all}) {
    reg.augmented(sub);
    reg.classifier(sub);
  }

  std::string command;
  try {
    if (const auto path = find_config(argc, argv)) {
      CLI::App* target = nullptr;
      for (int i = 1; i < argc && target == nullptr; ++i) {
        for (auto* sub : {gen, train, aug, cmp, all}) {
          if (sub->get_name() == argv[i]) target = sub;
        }
      }
      if (target != nullptr) reg.apply_config(*path, target);
    }
    app.parse(argc, argv);
    reg.finish();
    config.vaegan.seed = config.seed;
    config.vaegan.image_shape = ImageShape{3, config.data.image_size, config.data.image_size};
    for (auto* sub : {gen, train, aug, cmp, all}) {
      if (sub->parsed()) command = sub->get_name();
    }
    config.validate();

    const auto summary = config.out / "run_summary.json";
    fs::remove(summary);
    torch::set_num_threads(1);
    RunArtifacts art;
    if (command == "gen-data") art = cmd_gen_data(config);
    if (command == "train-vaegan") art = cmd_train_vaegan(config);
    if (command == "augment") art = cmd_augment(config);
    if (command == "compare") art = cmd_compare(config);
    if (command == "all") art = cmd_all(config);
    write_run_summary(command, config, art);
    log_line("wrote " + summary.string());
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const RuntimeFailure& e) {
    std::cerr << "runtime failure: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << std::endl;
    return 2;
  }
}

}  // namespace semaug::cli
