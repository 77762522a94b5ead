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

// DFKG1 model checkpoints.
//
//   "DFKG1"                                 5 bytes
//   u32 json_len, json_len bytes            ModelSpec as UTF-8 JSON
//   repeated until EOF:
//     u32 name_len, name bytes
//     u32 rank, rank x u32 dims
//     prod(dims) x float32 payload
//
// All integers and floats are little-endian. Trainable parameters come first
// in canonical order, then "<bn>.mean" / "<bn>.var" running statistics.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "distillkit/netblocks.hpp"

namespace dk {

std::string spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const std::string& text);

std::vector<std::uint8_t> serialize_checkpoint(const Model<float>& model);
Model<float> deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Model<float>& model, const std::filesystem::path& path);
Model<float> load_checkpoint(const std::filesystem::path& path);

/// SHA-256 of the serialized checkpoint, lowercase hex.
std::string model_fingerprint(const Model<float>& model);

}  // namespace dk
