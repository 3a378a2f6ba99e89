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

#include "semaug/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

namespace semaug::image_io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

std::uint8_t to_byte(float v) {
  const float scaled = std::round((v + 1.0F) * 127.5F);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0F, 255.0F));
}

float from_byte(std::uint8_t p) { return static_cast<float>(p) / 127.5F - 1.0F; }

torch::Tensor read_png(const std::filesystem::path& path,
                       const ImageShape& expected) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw ValidationError("cannot read PNG '" + path.string() +
                          "': " + image.message);
  }
  if (image.height != expected.height || image.width != expected.width) {
    png_image_free(&image);
    throw ValidationError("image shape mismatch for '" + path.string() +
                          "': got " + std::to_string(image.height) + "x" +
                          std::to_string(image.width) + ", expected " +
                          expected.to_string());
  }
  const bool rgb = expected.channels == 3;
  if (!rgb && expected.channels != 1) {
    png_image_free(&image);
    throw ValidationError("only 1- or 3-channel images are supported");
  }
  image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string message = image.message;
    png_image_free(&image);
    throw ValidationError("cannot decode PNG '" + path.string() +
                          "': " + message);
  }

  const auto c = expected.channels;
  const auto h = expected.height;
  const auto w = expected.width;
  auto out = torch::empty({c, h, w}, torch::kFloat32);
  auto acc = out.accessor<float, 3>();
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        acc[ch][y][x] = from_byte(buffer[static_cast<std::size_t>((y * w + x) * c + ch)]);
      }
    }
  }
  return out;
}

void write_png(const std::filesystem::path& path, const torch::Tensor& image) {
  TORCH_CHECK(image.dim() == 3, "write_png expects [C, H, W]");
  const auto t = image.to(torch::kFloat32).contiguous();
  const auto c = t.size(0);
  const auto h = t.size(1);
  const auto w = t.size(2);
  if (c != 1 && c != 3) {
    throw ValidationError("only 1- or 3-channel images can be written");
  }
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(c * h * w));
  auto acc = t.accessor<float, 3>();
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        buffer[static_cast<std::size_t>((y * w + x) * c + ch)] = to_byte(acc[ch][y][x]);
      }
    }
  }

  png_image out{};
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(w);
  out.height = static_cast<png_uint_32>(h);
  out.format = c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  // The simplified API embeds no timestamps, so equal pixels give equal bytes.
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    throw RuntimeFailure("cannot open '" + path.string() + "' for writing");
  }
  if (png_image_write_to_stdio(&out, file.get(), 0, buffer.data(), 0, nullptr) == 0) {
    throw RuntimeFailure("cannot encode PNG '" + path.string() +
                         "': " + out.message);
  }
}

torch::Tensor quantize(const torch::Tensor& image) {
  return ((image.clamp(-1.0, 1.0) + 1.0) * 127.5).round() / 127.5 - 1.0;
}

torch::Tensor make_grid(std::span<const torch::Tensor> tiles,
                        const GridGeometry& g) {
  if (g.rows <= 0 || g.cols <= 0 || g.tile_height <= 0 || g.tile_width <= 0) {
    throw ValidationError("grid geometry must be positive");
  }
  if (static_cast<std::int64_t>(tiles.size()) > g.rows * g.cols) {
    throw ValidationError("more tiles than grid cells");
  }
  const std::int64_t channels = tiles.empty() ? 3 : tiles.front().size(0);
  auto canvas = torch::zeros({channels, g.height(), g.width()}, torch::kFloat32);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const auto& tile = tiles[i];
    if (tile.size(0) != channels || tile.size(1) != g.tile_height ||
        tile.size(2) != g.tile_width) {
      throw ValidationError("grid tile " + std::to_string(i) +
                            " does not match the declared tile size");
    }
    const auto r = static_cast<std::int64_t>(i) / g.cols;
    const auto col = static_cast<std::int64_t>(i) % g.cols;
    const auto y0 = g.padding + r * (g.tile_height + g.padding);
    const auto x0 = g.padding + col * (g.tile_width + g.padding);
    canvas.narrow(1, y0, g.tile_height)
        .narrow(2, x0, g.tile_width)
        .copy_(tile.to(torch::kFloat32));
  }
  return canvas;
}

}  // namespace semaug::image_io
