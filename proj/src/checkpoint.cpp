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

#include "semaug/checkpoint.hpp"

#include "semaug/common.hpp"

namespace semaug::checkpoint {

void save(const std::filesystem::path& path, const Header& header,
          std::span<const Section> sections) {
  torch::serialize::OutputArchive archive;
  archive.write("meta.kind", c10::IValue(header.kind));
  archive.write("meta.config", c10::IValue(header.config_json));
  archive.write("meta.step", c10::IValue(header.step));
  for (const auto& section : sections) {
    for (const auto& p : section.module->named_parameters(true)) {
      archive.write(section.prefix + "." + p.key(), p.value().detach());
    }
    for (const auto& b : section.module->named_buffers(true)) {
      archive.write(section.prefix + "." + b.key(), b.value().detach(), true);
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  try {
    archive.save_to(path.string());
  } catch (const c10::Error& e) {
    throw RuntimeFailure("cannot write checkpoint '" + path.string() + "': " + e.what());
  }
}

namespace {

torch::serialize::InputArchive open(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw RuntimeFailure("checkpoint not found: " + path.string());
  }
  torch::serialize::InputArchive archive;
  try {
    archive.load_from(path.string());
  } catch (const c10::Error& e) {
    throw RuntimeFailure("cannot read checkpoint '" + path.string() + "': " + e.what());
  }
  return archive;
}

}  // namespace

Header read_header(const std::filesystem::path& path) {
  auto archive = open(path);
  c10::IValue kind, config, step;
  if (!archive.try_read("meta.kind", kind) || !archive.try_read("meta.config", config) ||
      !archive.try_read("meta.step", step)) {
    throw RuntimeFailure("checkpoint '" + path.string() + "' lacks its header");
  }
  return Header{kind.toStringRef(), config.toStringRef(), step.toInt()};
}

void load_into(const std::filesystem::path& path, std::span<const Section> sections) {
  auto archive = open(path);
  torch::NoGradGuard no_grad;
  auto copy = [&](const std::string& key, torch::Tensor target, bool is_buffer) {
    torch::Tensor stored;
    if (!archive.try_read(key, stored, is_buffer)) {
      throw RuntimeFailure("checkpoint '" + path.string() + "' is missing '" + key + "'");
    }
    if (stored.sizes() != target.sizes()) {
      throw RuntimeFailure("checkpoint tensor '" + key + "' has the wrong shape");
    }
    target.copy_(stored);
  };
  for (const auto& section : sections) {
    for (auto& p : section.module->named_parameters(true)) {
      copy(section.prefix + "." + p.key(), p.value(), false);
    }
    for (auto& b : section.module->named_buffers(true)) {
      copy(section.prefix + "." + b.key(), b.value(), true);
    }
  }
}

}  // namespace semaug::checkpoint
