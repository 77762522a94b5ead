// Copyright 2026 The distillkit Authors. All Rights Reserved.
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

// Run configuration files: UTF-8, one "key = value" per line under
// "[section]" headers, '#' starts a comment. Unknown sections or keys are
// errors.
//
//   [hyper]  alpha temperature gamma overlay_p attention_power lr epochs batch_size
//   [model]  family blocks_removed teacher_checkpoint
//   [data]   kind path n_per_class test_per_class seed
//   [run]    method seed runs fraction ig_maps teacher_outputs output_dir

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "distillkit/losses.hpp"
#include "distillkit/netblocks.hpp"

namespace dk {

struct RunConfig {
  HyperParams hyper;

  Family family = Family::kMicroNet;
  std::size_t blocks_removed = 2;
  std::string teacher_checkpoint;

  std::string data_kind = "synthetic";  // "synthetic" or "cifar10"
  std::string data_path;                // CIFAR-10 binary directory
  std::size_t n_per_class = 100;
  std::size_t test_per_class = 50;
  std::uint64_t data_seed = 0;

  std::string method = "KD & IG";
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  double fraction = 1.0;
  std::string ig_maps;
  std::string teacher_outputs;
  std::string output_dir = "out";

  /// Range checks, then existence of every non-empty referenced input path.
  void validate(bool check_paths = true) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError naming the line for syntax errors and unknown keys.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace dk
