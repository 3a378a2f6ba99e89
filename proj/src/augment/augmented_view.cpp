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

#include "semaug/augment/augmented_view.hpp"

namespace semaug::augment {

AugmentedView::AugmentedView(const data::DatasetManifest& originals,
                             const AugmentedDataset* augmented, data::SamplingMode mode)
    : originals_(originals), augmented_(augmented), mode_(mode) {
  if (augmented_ != nullptr) {
    if (augmented_->class_count() != originals_.class_count()) {
      throw ValidationError("augmented view: class counts differ");
    }
    for (const auto& g : augmented_->samples()) {
      if (g.image.dim() != 3 || g.image.size(0) != originals_.image_shape().channels ||
          g.image.size(1) != originals_.image_shape().height ||
          g.image.size(2) != originals_.image_shape().width) {
        throw ValidationError("augmented view: generated image '" + g.id + "' has the wrong shape");
      }
    }
  }
  if (const auto* balanced = std::get_if<data::ClassBalanced>(&mode_)) {
    if (!(balanced->augment_ratio >= 0.0 && balanced->augment_ratio <= 1.0)) {
      throw ValidationError("augmented view: augment_ratio must lie in [0, 1]");
    }
  }
  for (std::int64_t c = 0; c < originals_.class_count(); ++c) {
    if (originals_.histogram()[static_cast<std::size_t>(c)] > 0) classes_.push_back(c);
  }
  if (classes_.empty()) throw ValidationError("augmented view: no original samples");
}

DrawnSample AugmentedView::draw(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick_class(0, classes_.size() - 1);
  const auto c = classes_[pick_class(rng)];
  double ratio = 0.0;
  if (const auto* balanced = std::get_if<data::ClassBalanced>(&mode_)) {
    ratio = balanced->augment_ratio;
  }
  if (ratio > 0.0 && augmented_ != nullptr) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool use_generated = unit(rng) < ratio;
    const auto& generated = augmented_->class_indices(c);
    if (use_generated && !generated.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, generated.size() - 1);
      return DrawnSample{true, generated[pick(rng)], c};
    }
  }
  const auto& members = originals_.class_indices(c);
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  return DrawnSample{false, members[pick(rng)], c};
}

std::vector<DrawnSample> AugmentedView::draw_batch(std::size_t n, Rng& rng) const {
  std::vector<DrawnSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng));
  return out;
}

const torch::Tensor& AugmentedView::image(const DrawnSample& s) const {
  return s.generated ? (*augmented_)[s.index].image : originals_[s.index].image;
}

std::pair<torch::Tensor, torch::Tensor> AugmentedView::materialize(
    const std::vector<DrawnSample>& batch) const {
  std::vector<torch::Tensor> images;
  std::vector<std::int64_t> labels;
  images.reserve(batch.size());
  for (const auto& s : batch) {
    images.push_back(image(s));
    labels.push_back(s.label);
  }
  return {torch::stack(images), torch::tensor(labels, torch::kInt64)};
}

}  // namespace semaug::augment
