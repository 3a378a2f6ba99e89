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
#include <span>
#include <vector>

#include <torch/torch.h>

#include "semaug/common.hpp"

namespace semaug::image_io {

/// [-1, 1] float -> [0, 255] byte, round-to-nearest with clamping.
std::uint8_t to_byte(float v);
/// Exact inverse of the byte grid: p / 127.5 - 1.
float from_byte(std::uint8_t p);

/// Decodes an 8-bit grayscale or RGB PNG to a [C, H, W] tensor in [-1, 1].
/// Gray input is replicated when `expected.channels` is 3 and RGB input is
/// reduced to luma when it is 1; any size mismatch throws ValidationError.
torch::Tensor read_png(const std::filesystem::path& path,
                       const ImageShape& expected);

/// Encodes a [C, H, W] tensor (C = 1 or 3) with values in [-1, 1].
void write_png(const std::filesystem::path& path, const torch::Tensor& image);

/// Rounds a [-1, 1] tensor onto the 8-bit grid a PNG round trip yields.
torch::Tensor quantize(const torch::Tensor& image);

struct GridGeometry {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::int64_t tile_height = 0;
  std::int64_t tile_width = 0;
  std::int64_t padding = 2;

  std::int64_t height() const { return rows * tile_height + (rows + 1) * padding; }
  std::int64_t width() const { return cols * tile_width + (cols + 1) * padding; }
};

/// Lays tiles out row-major on a mid-gray canvas. Missing trailing tiles
/// stay background.
torch::Tensor make_grid(std::span<const torch::Tensor> tiles,
                        const GridGeometry& geometry);

}  // namespace semaug::image_io
