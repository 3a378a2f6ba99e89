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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "semaug/augment/synthesis.hpp"
#include "semaug/data.hpp"
#include "semaug/evalcls/metrics.hpp"

namespace semaug::evalcls {

enum class Strategy { None, Balanced, Ours };

std::string to_string(Strategy s);
/// Accepts "none", "balanced", "ours" in any case.
Strategy parse_strategy(const std::string& name);

enum class LrSchedule { Constant, Cosine };

struct ClassifierConfig {
  // Registered network name; see make_network.
  std::string architecture = "resnet";
  std::int64_t width = 16;
  std::int64_t blocks_per_stage = 1;
  int epochs = 40;
  std::int64_t batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  LrSchedule schedule = LrSchedule::Cosine;
  Strategy strategy = Strategy::None;
  double augment_ratio = 0.5;
  int original_only_tail = 5;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_json() const;
  static ClassifierConfig from_json(const std::string& text);
};

/// A classification network producing logits [B, K].
class ClassifierNetImpl : public torch::nn::Module {
 public:
  virtual torch::Tensor forward(const torch::Tensor& x) = 0;
};

/// Small pre-activation residual network: stem, three stages at widths
/// w, 2w, 4w (the last two halve resolution), global average pool, linear.
class ResidualNetImpl : public ClassifierNetImpl {
 public:
  ResidualNetImpl(std::int64_t in_channels, std::int64_t class_count, std::int64_t width,
                  std::int64_t blocks_per_stage);
  torch::Tensor forward(const torch::Tensor& x) override;

 private:
  torch::nn::Conv2d stem_{nullptr};
  torch::nn::Sequential body_{nullptr};
  torch::nn::BatchNorm2d norm_{nullptr};
  torch::nn::Linear head_{nullptr};
};

/// Builds the network named by config.architecture. Throws ValidationError
/// for unknown names.
std::shared_ptr<ClassifierNetImpl> make_network(const ClassifierConfig& config,
                                                std::int64_t class_count,
                                                const ImageShape& shape);

class Classifier final : public Scorer {
 public:
  Classifier(const ClassifierConfig& config, std::int64_t class_count, const ImageShape& shape);

  /// Softmax probabilities [B, K]; eval mode, no autograd.
  torch::Tensor predict_scores(const torch::Tensor& images) const override;
  std::int64_t class_count() const override { return class_count_; }
  const ClassifierConfig& config() const { return config_; }
  const ImageShape& image_shape() const { return shape_; }
  ClassifierNetImpl& net() { return *net_; }

  void save(const std::filesystem::path& path) const;
  static Classifier load(const std::filesystem::path& path);

 private:
  ClassifierConfig config_;
  std::int64_t class_count_;
  ImageShape shape_;
  std::shared_ptr<ClassifierNetImpl> net_;
};

struct EpochRecord {
  int epoch = 0;
  std::string mode;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainingSource {
  const data::DatasetManifest* train = nullptr;
  // Required by Strategy::Ours.
  const augment::AugmentedDataset* augmented = nullptr;
  // Optional monitoring split.
  const data::DatasetManifest* validation = nullptr;
};

struct TrainedClassifier {
  Classifier classifier;
  std::vector<EpochRecord> log;
  // Mean cross-entropy of the first minibatch.
  double initial_loss = 0.0;
};

class NonFiniteClassifierLoss : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Cross-entropy training with Adam for config.epochs epochs of
/// ceil(|train| / batch_size) steps each. None shuffles the originals each
/// epoch; Balanced draws class-balanced batches; Ours serves the augmented
/// view under data::epoch_mode. Returns the final-epoch model.
TrainedClassifier train_classifier(const TrainingSource& source, const ClassifierConfig& config,
                                   const EpochCallback& on_epoch = {});

}  // namespace semaug::evalcls
