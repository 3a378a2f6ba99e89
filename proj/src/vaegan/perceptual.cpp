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

#include "semaug/vaegan/perceptual.hpp"

#include <cmath>

namespace semaug::vaegan {

PyramidFeatures::PyramidFeatures(std::int64_t in_channels, std::uint64_t seed,
                                 std::int64_t width, torch::Dtype dtype) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  std::int64_t in = in_channels;
  for (std::int64_t out : {width, 2 * width, 4 * width}) {
    // He-normal so activations keep their scale through the random stages.
    const double stddev = std::sqrt(2.0 / static_cast<double>(in * 9));
    weights_.push_back(
        (torch::randn({out, in, 3, 3}, gen, torch::TensorOptions().dtype(torch::kFloat64)) *
         stddev)
            .to(dtype));
    biases_.push_back(
        (torch::randn({out}, gen, torch::TensorOptions().dtype(torch::kFloat64)) * 0.1).to(dtype));
    in = out;
  }
}

torch::Tensor PyramidFeatures::features(const torch::Tensor& images) const {
  constexpr double kEps = 1e-10;
  std::vector<torch::Tensor> parts;
  torch::Tensor h = images;
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    if (s > 0) h = torch::avg_pool2d(h, 2);
    h = torch::relu(torch::conv2d(h, weights_[s].to(h.dtype()), biases_[s].to(h.dtype()),
                                  /*stride=*/1, /*padding=*/1));
    const auto norm = torch::sqrt(h.square().sum(1, /*keepdim=*/true) + kEps);
    parts.push_back((h / norm).flatten(1));
  }
  return torch::cat(parts, 1);
}

}  // namespace semaug::vaegan
