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

#include <cstddef>
#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "semaug/augment/synthesis.hpp"
#include "semaug/data.hpp"

namespace semaug::augment {

struct DrawnSample {
  bool generated = false;
  // Index into the manifest, or into the augmented dataset when generated.
  std::size_t index = 0;
  std::int64_t label = 0;
};

/// Class-balanced stream over originals plus generated samples.
///
/// ClassBalanced{ratio}: pick a class uniformly among classes with original
/// samples; with probability `ratio` serve a uniformly chosen generated
/// sample of that class (an original when the class has none), else a
/// uniformly chosen original. OriginalOnly: originals only, class-balanced.
/// With ratio 0 the draws consume the RNG exactly like
/// data::balanced_batch_indices, so both yield identical sequences.
/// `originals` may be a subset of the manifest the generated samples came
/// from (e.g. a training split); only label space and shape are checked.
class AugmentedView {
 public:
  AugmentedView(const data::DatasetManifest& originals, const AugmentedDataset* augmented,
                data::SamplingMode mode);

  DrawnSample draw(Rng& rng) const;
  std::vector<DrawnSample> draw_batch(std::size_t n, Rng& rng) const;

  const torch::Tensor& image(const DrawnSample& s) const;
  /// Stacks a drawn batch into images [B, C, H, W] and labels [B].
  std::pair<torch::Tensor, torch::Tensor> materialize(const std::vector<DrawnSample>& batch) const;

 private:
  const data::DatasetManifest& originals_;
  const AugmentedDataset* augmented_;
  data::SamplingMode mode_;
  std::vector<std::int64_t> classes_;
};

}  // namespace semaug::augment
