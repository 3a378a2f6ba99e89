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
#include <vector>

#include <torch/torch.h>

#include "semaug/common.hpp"

namespace semaug::vaegan {

/// Maps an image batch [B, C, H, W] to flattened features [B, F].
/// Implementations must be deterministic and differentiable in the input.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual torch::Tensor features(const torch::Tensor& images) const = 0;
};

/// Fixed random convolutional pyramid: three conv+ReLU stages separated by
/// 2x average pooling. Each stage's activations are normalized to unit
/// length across channels at every position, then all stages are
/// flattened and concatenated. Weights come from `seed` and never train.
class PyramidFeatures final : public FeatureExtractor {
 public:
  PyramidFeatures(std::int64_t in_channels, std::uint64_t seed, std::int64_t width = 16,
                  torch::Dtype dtype = torch::kFloat32);

  torch::Tensor features(const torch::Tensor& images) const override;

 private:
  std::vector<torch::Tensor> weights_;
  std::vector<torch::Tensor> biases_;
};

}  // namespace semaug::vaegan
