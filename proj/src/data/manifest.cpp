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

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "semaug/data.hpp"
#include "semaug/image_io.hpp"

namespace semaug::data {

namespace fs = std::filesystem;
using nlohmann::json;

ManifestError::ManifestError(const std::string& what, std::size_t line)
    : ValidationError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

std::vector<std::int64_t> compute_histogram(std::span<const LabeledSample> samples,
                                            std::int64_t class_count) {
  std::vector<std::int64_t> hist(static_cast<std::size_t>(class_count), 0);
  for (const auto& s : samples) {
    if (s.label < 0 || s.label >= class_count) {
      throw ManifestError("label out of range: " + std::to_string(s.label));
    }
    ++hist[static_cast<std::size_t>(s.label)];
  }
  return hist;
}

DatasetManifest::DatasetManifest(std::vector<LabeledSample> samples,
                                 std::int64_t class_count, ImageShape image_shape,
                                 std::vector<std::string> class_names)
    : samples_(std::move(samples)),
      class_count_(class_count),
      image_shape_(image_shape),
      class_names_(std::move(class_names)) {
  if (class_count_ < 1) throw ManifestError("class_count must be >= 1");
  if (image_shape_.channels < 1 || image_shape_.height < 1 || image_shape_.width < 1) {
    throw ManifestError("image_shape entries must be positive");
  }
  if (!class_names_.empty() &&
      static_cast<std::int64_t>(class_names_.size()) != class_count_) {
    throw ManifestError("class_names must have class_count entries");
  }
  const std::vector<std::int64_t> expected{image_shape_.channels, image_shape_.height,
                                           image_shape_.width};
  by_class_.assign(static_cast<std::size_t>(class_count_), {});
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    auto& s = samples_[i];
    if (s.label < 0 || s.label >= class_count_) {
      throw ManifestError("sample '" + s.id + "': label out of range (" +
                          std::to_string(s.label) + " not in [0, " +
                          std::to_string(class_count_) + "))");
    }
    if (!s.image.defined() || s.image.sizes().vec() != expected) {
      throw ManifestError("sample '" + s.id + "': image shape mismatch, expected " +
                          image_shape_.to_string());
    }
    s.image = s.image.to(torch::kFloat32).contiguous();
    if (s.image.numel() > 0 &&
        (s.image.min().item<float>() < -1.0F || s.image.max().item<float>() > 1.0F)) {
      throw ManifestError("sample '" + s.id + "': pixel values outside [-1, 1]");
    }
    by_class_[static_cast<std::size_t>(s.label)].push_back(i);
  }
  histogram_.reserve(by_class_.size());
  for (const auto& idx : by_class_) {
    histogram_.push_back(static_cast<std::int64_t>(idx.size()));
  }
}

std::optional<std::size_t> DatasetManifest::find(const std::string& id) const {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].id == id) return i;
  }
  return std::nullopt;
}

torch::Tensor DatasetManifest::stack(std::span<const std::size_t> indices) const {
  if (indices.empty()) {
    return torch::empty({0, image_shape_.channels, image_shape_.height, image_shape_.width});
  }
  std::vector<torch::Tensor> images;
  images.reserve(indices.size());
  for (auto i : indices) images.push_back(samples_.at(i).image);
  return torch::stack(images);
}

torch::Tensor DatasetManifest::stack_all() const {
  std::vector<std::size_t> all(samples_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return stack(all);
}

std::uint64_t DatasetManifest::fingerprint() const {
  std::uint64_t h = fnv1a(std::to_string(class_count_) + "|" + image_shape_.to_string());
  for (const auto& s : samples_) {
    h = fnv1a(s.id + "|" + std::to_string(s.label) + "|", h);
    const auto* p = reinterpret_cast<const char*>(s.image.data_ptr<float>());
    h = fnv1a(std::string(p, p + s.image.numel() * sizeof(float)), h);
  }
  return h;
}

namespace {

ImageShape parse_shape(const json& j, std::size_t line) {
  if (!j.is_array() || j.size() != 3) {
    throw ManifestError("image_shape must be [channels, height, width]", line);
  }
  ImageShape shape{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(),
                   j[2].get<std::int64_t>()};
  if (shape.channels < 1 || shape.height < 1 || shape.width < 1) {
    throw ManifestError("image_shape entries must be positive", line);
  }
  return shape;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest '" + path.string() + "'");
  const fs::path base = path.parent_path();

  std::string text;
  std::size_t line_no = 0;
  std::optional<std::int64_t> class_count;
  ImageShape shape;
  std::vector<std::string> class_names;
  std::vector<LabeledSample> samples;

  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ManifestError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ManifestError("expected a JSON object", line_no);

    try {
      if (!class_count) {
        if (!obj.contains("class_count") || !obj.contains("image_shape")) {
          throw ManifestError("first line must be a header with class_count and image_shape",
                              line_no);
        }
        class_count = obj.at("class_count").get<std::int64_t>();
        if (*class_count < 1) throw ManifestError("class_count must be >= 1", line_no);
        shape = parse_shape(obj.at("image_shape"), line_no);
        if (obj.contains("class_names")) {
          class_names = obj.at("class_names").get<std::vector<std::string>>();
        }
        continue;
      }

      if (!obj.contains("label")) throw ManifestError("missing field 'label'", line_no);
      LabeledSample s;
      s.label = obj.at("label").get<std::int64_t>();
      if (s.label < 0 || s.label >= *class_count) {
        throw ManifestError("label out of range (" + std::to_string(s.label) +
                                " not in [0, " + std::to_string(*class_count) + "))",
                            line_no);
      }
      if (obj.contains("pixels")) {
        const auto values = obj.at("pixels").get<std::vector<float>>();
        if (static_cast<std::int64_t>(values.size()) != shape.numel()) {
          throw ManifestError("image shape mismatch: inline tensor has " +
                                  std::to_string(values.size()) + " values, expected " +
                                  std::to_string(shape.numel()),
                              line_no);
        }
        s.image = torch::tensor(values).reshape({shape.channels, shape.height, shape.width});
        s.id = obj.value("id", "line-" + std::to_string(line_no));
      } else if (obj.contains("path")) {
        fs::path p = obj.at("path").get<std::string>();
        if (p.is_relative()) p = base / p;
        if (!fs::exists(p)) {
          throw ManifestError("image file not found: " + p.string(), line_no);
        }
        try {
          s.image = image_io::read_png(p, shape);
        } catch (const ValidationError& e) {
          throw ManifestError(e.what(), line_no);
        }
        s.id = obj.value("id", obj.at("path").get<std::string>());
        s.path = p;
      } else {
        throw ManifestError("sample needs 'path' or 'pixels'", line_no);
      }
      samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ManifestError(std::string("malformed field: ") + e.what(), line_no);
    }
  }
  if (!class_count) throw ManifestError("manifest '" + path.string() + "' has no header");

  try {
    return DatasetManifest(std::move(samples), *class_count, shape, std::move(class_names));
  } catch (const ManifestError& e) {
    throw ManifestError(std::string(e.what()) + " in '" + path.string() + "'");
  }
}

void save_manifest(const DatasetManifest& manifest, const fs::path& manifest_path,
                   const fs::path& image_dir, const std::vector<std::string>& extra_fields) {
  if (!extra_fields.empty() && extra_fields.size() != manifest.size()) {
    throw ValidationError("extra_fields must have one entry per sample");
  }
  fs::create_directories(image_dir);
  if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());

  const fs::path base = manifest_path.has_parent_path()
                            ? fs::absolute(manifest_path.parent_path())
                            : fs::current_path();
  std::ostringstream out;
  json header{{"class_count", manifest.class_count()},
              {"image_shape",
               {manifest.image_shape().channels, manifest.image_shape().height,
                manifest.image_shape().width}}};
  if (!manifest.class_names().empty()) header["class_names"] = manifest.class_names();
  out << header.dump() << '\n';

  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& s = manifest[i];
    std::string file = s.id;
    for (auto& ch : file) {
      if (ch == '/' || ch == '\\' || ch == ' ' || ch == ':') ch = '_';
    }
    const fs::path png = image_dir / (file + ".png");
    image_io::write_png(png, s.image);
    json line{{"id", s.id},
              {"path", fs::absolute(png).lexically_relative(base).generic_string()},
              {"label", s.label}};
    if (!extra_fields.empty()) line.update(json::parse(extra_fields[i]));
    out << line.dump() << '\n';
  }
  std::ofstream f(manifest_path, std::ios::binary);
  if (!f) throw RuntimeFailure("cannot write manifest '" + manifest_path.string() + "'");
  f << out.str();
}

}  // namespace semaug::data
