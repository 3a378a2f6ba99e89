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
#include <string>

#include <torch/torch.h>

namespace semaug::checkpoint {

/// A module whose parameters and buffers are stored under `prefix`.
struct Section {
  std::string prefix;
  torch::nn::Module* module = nullptr;
};

struct Header {
  std::string kind;
  std::string config_json;
  std::int64_t step = 0;
};

/// Writes a self-describing archive: kind tag, JSON config, step counter and
/// every named parameter/buffer as "<prefix>.<name>".
void save(const std::filesystem::path& path, const Header& header,
          std::span<const Section> sections);

Header read_header(const std::filesystem::path& path);

/// Copies stored tensors into already-constructed modules; missing names or
/// shape mismatches throw RuntimeFailure.
void load_into(const std::filesystem::path& path, std::span<const Section> sections);

}  // namespace semaug::checkpoint
