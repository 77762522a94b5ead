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

#include "distillkit/checkpoint.hpp"

#include <json.hpp>

#include "distillkit/binio.hpp"

namespace dk {
namespace {

constexpr std::string_view kMagic = "DFKG1";

void put_tensor(io::ByteWriter& w, const std::string& name, const Tensor<float>& t) {
  w.u32(static_cast<std::uint32_t>(name.size()));
  w.bytes(name);
  w.u32(static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
  w.f32s(t.span());
}

}  // namespace

std::string spec_to_json(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["family"] = family_name(spec.family);
  j["num_classes"] = spec.num_classes;
  j["input_shape"] = spec.input_shape;
  j["attention_source"] = spec.attention_source;
  auto& blocks = j["blocks"] = nlohmann::ordered_json::array();
  for (const BlockSpec& b : spec.blocks) {
    blocks.push_back({{"kind", block_kind_name(b.kind)},
                      {"block_id", b.block_id},
                      {"in_channels", b.in_channels},
                      {"out_channels", b.out_channels},
                      {"expansion", b.expansion},
                      {"stride", b.stride},
                      {"kernel", b.kernel}});
  }
  return j.dump();
}

ModelSpec spec_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelSpec s;
    s.name = j.at("name").get<std::string>();
    s.family = parse_family(j.at("family").get<std::string>());
    s.num_classes = j.at("num_classes").get<std::size_t>();
    s.input_shape = j.at("input_shape").get<std::array<std::size_t, 3>>();
    s.attention_source = j.at("attention_source").get<int>();
    for (const auto& b : j.at("blocks")) {
      s.blocks.push_back({parse_block_kind(b.at("kind").get<std::string>()), b.at("block_id").get<int>(),
                          b.at("in_channels").get<std::size_t>(), b.at("out_channels").get<std::size_t>(),
                          b.at("expansion").get<std::size_t>(), b.at("stride").get<std::size_t>(),
                          b.at("kernel").get<std::size_t>()});
    }
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model spec JSON: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("invalid model spec: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("invalid model spec: ") + e.what());
  }
}

std::vector<std::uint8_t> serialize_checkpoint(const Model<float>& model) {
  io::ByteWriter w;
  w.bytes(kMagic);
  const std::string js = spec_to_json(model.spec);
  w.u32(static_cast<std::uint32_t>(js.size()));
  w.bytes(js);
  for (std::size_t i = 0; i < model.params.size(); ++i) put_tensor(w, model.param_names[i], model.params[i]);
  for (std::size_t i = 0; i < model.bn_running.size(); ++i) {
    put_tensor(w, model.bn_names[i] + ".mean", model.bn_running[i].mean);
    put_tensor(w, model.bn_names[i] + ".var", model.bn_running[i].var);
  }
  return std::move(w.buffer());
}

Model<float> deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader r(bytes, "checkpoint");
  if (r.bytes(kMagic.size()) != kMagic) throw DataError("checkpoint: bad magic (expected DFKG1)");
  const std::uint32_t jlen = r.u32();
  Model<float> m = instantiate<float>(spec_from_json(r.bytes(jlen)), 0);
  std::size_t loaded = 0;
  while (!r.at_end()) {
    const std::size_t at = r.offset();
    const std::string name = r.bytes(r.u32());
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    Tensor<float> t(shape);
    for (auto& v : t.vec()) v = r.f32();
    Tensor<float>* dst = nullptr;
    for (std::size_t i = 0; i < m.param_names.size() && !dst; ++i) {
      if (m.param_names[i] == name) dst = &m.params[i];
    }
    for (std::size_t i = 0; i < m.bn_names.size() && !dst; ++i) {
      if (m.bn_names[i] + ".mean" == name) dst = &m.bn_running[i].mean;
      if (m.bn_names[i] + ".var" == name) dst = &m.bn_running[i].var;
    }
    if (!dst) throw DataError("checkpoint: unexpected tensor '" + name + "' at byte offset " + std::to_string(at));
    if (dst->shape() != shape) {
      throw DataError("checkpoint: tensor '" + name + "' has shape " + shape_str(shape) + ", spec implies " +
                      shape_str(dst->shape()));
    }
    *dst = std::move(t);
    ++loaded;
  }
  if (loaded != m.params.size() + 2 * m.bn_running.size()) {
    throw DataError("checkpoint: expected " + std::to_string(m.params.size() + 2 * m.bn_running.size()) +
                    " tensors, found " + std::to_string(loaded));
  }
  return m;
}

void save_checkpoint(const Model<float>& model, const std::filesystem::path& path) {
  io::write_file(path, serialize_checkpoint(model));
}

Model<float> load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(io::read_file(path)); }

std::string model_fingerprint(const Model<float>& model) { return io::sha256_hex(serialize_checkpoint(model)); }

}  // namespace dk
