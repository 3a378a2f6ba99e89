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

#include "semaug/evalcls/classifier.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "semaug/augment/augmented_view.hpp"
#include "semaug/checkpoint.hpp"

namespace semaug::evalcls {

using nlohmann::json;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::None: return "None";
    case Strategy::Balanced: return "Balanced";
    case Strategy::Ours: return "Ours";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  std::string lower;
  for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "none") return Strategy::None;
  if (lower == "balanced") return Strategy::Balanced;
  if (lower == "ours") return Strategy::Ours;
  throw ValidationError("unknown strategy '" + name + "' (expected none, balanced or ours)");
}

void ClassifierConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("classifier config: " + what); };
  if (architecture.empty()) fail("architecture must be set");
  if (width < 1) fail("width must be >= 1");
  if (blocks_per_stage < 1) fail("blocks_per_stage must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!(augment_ratio >= 0.0 && augment_ratio <= 1.0)) fail("augment_ratio must lie in [0, 1]");
  if (original_only_tail < 0 || original_only_tail > epochs) {
    fail("original_only_tail must lie in [0, epochs]");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) fail("val_fraction must lie in [0, 1)");
}

std::string ClassifierConfig::to_json() const {
  json j{{"architecture", architecture},
         {"width", width},
         {"blocks_per_stage", blocks_per_stage},
         {"epochs", epochs},
         {"batch_size", batch_size},
         {"lr", lr},
         {"weight_decay", weight_decay},
         {"schedule", schedule == LrSchedule::Cosine ? "cosine" : "constant"},
         {"strategy", to_string(strategy)},
         {"augment_ratio", augment_ratio},
         {"original_only_tail", original_only_tail},
         {"val_fraction", val_fraction},
         {"seed", seed}};
  return j.dump();
}

ClassifierConfig ClassifierConfig::from_json(const std::string& text) {
  const auto j = json::parse(text);
  ClassifierConfig c;
  c.architecture = j.at("architecture").get<std::string>();
  c.width = j.at("width").get<std::int64_t>();
  c.blocks_per_stage = j.at("blocks_per_stage").get<std::int64_t>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<std::int64_t>();
  c.lr = j.at("lr").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.schedule = j.at("schedule").get<std::string>() == "cosine" ? LrSchedule::Cosine
                                                               : LrSchedule::Constant;
  c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  c.augment_ratio = j.at("augment_ratio").get<double>();
  c.original_only_tail = j.at("original_only_tail").get<int>();
  c.val_fraction = j.at("val_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

namespace {

class PreActBlockImpl : public torch::nn::Module {
 public:
  PreActBlockImpl(std::int64_t in, std::int64_t out, std::int64_t stride) {
    bn1_ = register_module("bn1", torch::nn::BatchNorm2d(in));
    conv1_ = register_module(
        "conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).stride(stride).padding(1).bias(false)));
    bn2_ = register_module("bn2", torch::nn::BatchNorm2d(out));
    conv2_ = register_module(
        "conv2", torch::nn::Conv2d(torch::nn::Conv2dOptions(out, out, 3).padding(1).bias(false)));
    if (stride != 1 || in != out) {
      skip_ = register_module(
          "skip", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 1).stride(stride).bias(false)));
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    const auto a = torch::relu(bn1_(x));
    auto h = conv1_(a);
    h = conv2_(torch::relu(bn2_(h)));
    return h + (skip_ ? skip_(a) : x);
  }

 private:
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr};
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr}, skip_{nullptr};
};
TORCH_MODULE(PreActBlock);

}  // namespace

ResidualNetImpl::ResidualNetImpl(std::int64_t in_channels, std::int64_t class_count,
                                 std::int64_t width, std::int64_t blocks_per_stage) {
  stem_ = register_module(
      "stem", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_channels, width, 3).padding(1).bias(false)));
  torch::nn::Sequential body;
  std::int64_t in = width;
  const std::array<std::int64_t, 3> widths{width, 2 * width, 4 * width};
  for (std::size_t stage = 0; stage < widths.size(); ++stage) {
    for (std::int64_t b = 0; b < blocks_per_stage; ++b) {
      const std::int64_t stride = (stage > 0 && b == 0) ? 2 : 1;
      body->push_back(PreActBlock(in, widths[stage], stride));
      in = widths[stage];
    }
  }
  body_ = register_module("body", body);
  norm_ = register_module("norm", torch::nn::BatchNorm2d(in));
  head_ = register_module("head", torch::nn::Linear(in, class_count));
}

torch::Tensor ResidualNetImpl::forward(const torch::Tensor& x) {
  auto h = torch::relu(norm_(body_->forward(stem_(x))));
  return head_(h.mean({2, 3}));
}

std::shared_ptr<ClassifierNetImpl> make_network(const ClassifierConfig& config,
                                                std::int64_t class_count,
                                                const ImageShape& shape) {
  if (config.architecture == "resnet") {
    return std::make_shared<ResidualNetImpl>(shape.channels, class_count, config.width,
                                             config.blocks_per_stage);
  }
  throw ValidationError("unknown classifier architecture '" + config.architecture + "'");
}

Classifier::Classifier(const ClassifierConfig& config, std::int64_t class_count,
                       const ImageShape& shape)
    : config_(config), class_count_(class_count), shape_(shape) {
  config_.validate();
  if (class_count_ < 2) throw ValidationError("classifier needs at least 2 classes");
  torch::manual_seed(derive_seed(config_.seed, 0xc1a55));
  net_ = make_network(config_, class_count_, shape_);
  net_->eval();
}

torch::Tensor Classifier::predict_scores(const torch::Tensor& images) const {
  if (images.dim() != 4 || images.size(1) != shape_.channels || images.size(2) != shape_.height ||
      images.size(3) != shape_.width) {
    throw ValidationError("predict_scores: expected images [B, " + shape_.to_string() + "]");
  }
  torch::NoGradGuard no_grad;
  const bool was_training = net_->is_training();
  net_->eval();
  auto scores = torch::softmax(net_->forward(images.to(torch::kFloat32)), 1);
  net_->train(was_training);
  return scores;
}

void Classifier::save(const std::filesystem::path& path) const {
  json meta{{"config", json::parse(config_.to_json())},
            {"class_count", class_count_},
            {"image_shape", {shape_.channels, shape_.height, shape_.width}}};
  const std::array<checkpoint::Section, 1> sections{checkpoint::Section{"net", net_.get()}};
  checkpoint::save(path, checkpoint::Header{"classifier", meta.dump(), 0}, sections);
}

Classifier Classifier::load(const std::filesystem::path& path) {
  const auto header = checkpoint::read_header(path);
  if (header.kind != "classifier") {
    throw ValidationError("'" + path.string() + "' holds a " + header.kind +
                          " checkpoint, not a classifier");
  }
  const auto meta = json::parse(header.config_json);
  const auto shape = meta.at("image_shape").get<std::array<std::int64_t, 3>>();
  Classifier out(ClassifierConfig::from_json(meta.at("config").dump()),
                 meta.at("class_count").get<std::int64_t>(), ImageShape{shape[0], shape[1], shape[2]});
  const std::array<checkpoint::Section, 1> sections{checkpoint::Section{"net", out.net_.get()}};
  checkpoint::load_into(path, sections);
  return out;
}

namespace {

std::string mode_name(const data::SamplingMode& mode) {
  if (const auto* b = std::get_if<data::ClassBalanced>(&mode)) {
    return "balanced(ratio=" + std::to_string(b->augment_ratio) + ")";
  }
  return "original_only";
}

double accuracy(const Classifier& classifier, const data::DatasetManifest& manifest) {
  std::int64_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < manifest.size(); start += 256) {
    idx.clear();
    for (std::size_t i = start; i < std::min(manifest.size(), start + 256); ++i) idx.push_back(i);
    const auto pred = classifier.predict_scores(manifest.stack(idx)).argmax(1);
    const auto* p = pred.data_ptr<std::int64_t>();
    for (std::size_t j = 0; j < idx.size(); ++j) correct += p[j] == manifest[idx[j]].label;
  }
  return static_cast<double>(correct) / static_cast<double>(manifest.size());
}

}  // namespace

TrainedClassifier train_classifier(const TrainingSource& source, const ClassifierConfig& config,
                                   const EpochCallback& on_epoch) {
  config.validate();
  if (source.train == nullptr || source.train->empty()) {
    throw ValidationError("train_classifier: training set is empty");
  }
  const auto& train = *source.train;
  if (config.strategy == Strategy::Ours && source.augmented == nullptr) {
    throw ValidationError("train_classifier: strategy Ours requires an augmented dataset");
  }

  TrainedClassifier result{Classifier(config, train.class_count(), train.image_shape()), {}, 0.0};
  auto& net = result.classifier.net();
  net.train();
  torch::optim::Adam opt(net.parameters(),
                         torch::optim::AdamOptions(config.lr).weight_decay(config.weight_decay));

  Rng rng(derive_seed(config.seed, 0x7a1));
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const auto steps_per_epoch = (train.size() + batch - 1) / batch;
  const auto total_steps = static_cast<double>(steps_per_epoch) * config.epochs;
  std::optional<augment::AugmentedView> view;
  if (config.strategy == Strategy::Ours) {
    view.emplace(train, source.augmented, data::ClassBalanced{config.augment_ratio});
  }

  std::vector<std::size_t> order(train.size());
  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    data::SamplingMode mode = data::ClassBalanced{0.0};
    if (config.strategy == Strategy::Ours) {
      mode = data::epoch_mode(epoch, config.epochs, config.original_only_tail, config.augment_ratio);
      view.emplace(train, source.augmented, mode);
    }
    if (config.strategy == Strategy::None) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
    }

    double loss_sum = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s, ++step) {
      torch::Tensor x, y;
      if (config.strategy == Strategy::None) {
        const auto begin = s * batch;
        const auto end = std::min(train.size(), begin + batch);
        const std::span<const std::size_t> idx(order.data() + begin, end - begin);
        x = train.stack(idx);
        std::vector<std::int64_t> labels;
        for (auto i : idx) labels.push_back(train[i].label);
        y = torch::tensor(labels, torch::kInt64);
      } else if (config.strategy == Strategy::Balanced) {
        const auto idx = data::balanced_batch_indices(train, batch, rng);
        x = train.stack(idx);
        std::vector<std::int64_t> labels;
        for (auto i : idx) labels.push_back(train[i].label);
        y = torch::tensor(labels, torch::kInt64);
      } else {
        std::tie(x, y) = view->materialize(view->draw_batch(batch, rng));
      }

      if (config.schedule == LrSchedule::Cosine) {
        const double lr = 0.5 * config.lr * (1.0 + std::cos(M_PI * static_cast<double>(step) / total_steps));
        for (auto& group : opt.param_groups()) {
          static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
        }
      }
      opt.zero_grad();
      const auto loss = torch::nn::functional::cross_entropy(net.forward(x), y);
      const double value = loss.item<double>();
      if (!std::isfinite(value)) {
        throw NonFiniteClassifierLoss("non-finite classifier loss at epoch " + std::to_string(epoch) +
                                      ", step " + std::to_string(step) + " (" +
                                      to_string(config.strategy) + ", seed " +
                                      std::to_string(config.seed) + ")");
      }
      if (step == 0) result.initial_loss = value;
      loss.backward();
      opt.step();
      loss_sum += value;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.mode = config.strategy == Strategy::None ? "shuffled" : mode_name(mode);
    record.train_loss = loss_sum / static_cast<double>(steps_per_epoch);
    if (source.validation != nullptr && !source.validation->empty()) {
      record.val_accuracy = accuracy(result.classifier, *source.validation);
      net.train();
    }
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  net.eval();
  return result;
}

}  // namespace semaug::evalcls
