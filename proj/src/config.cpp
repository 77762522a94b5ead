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

#include "distillkit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "distillkit/errors.hpp"

namespace dk {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

template <class U>
U parse_uint(const std::string& key, const std::string& v) {
  U out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field dbl(double RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = parse_double("value", v); },
          [m](const RunConfig& c) { return fmt_double(c.*m); }};
}
Field hdbl(double HyperParams::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.hyper.*m = parse_double("value", v); },
          [m](const RunConfig& c) { return fmt_double(c.hyper.*m); }};
}
template <class S, class U>
Field uint_field(U S::*m, S RunConfig::*owner) {
  return {[m, owner](RunConfig& c, const std::string& v) { (c.*owner).*m = parse_uint<U>("value", v); },
          [m, owner](const RunConfig& c) { return std::to_string((c.*owner).*m); }};
}
template <class U>
Field uint_top(U RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = parse_uint<U>("value", v); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}
Field str(std::string RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = v; }, [m](const RunConfig& c) { return c.*m; }};
}

// Ordered (section, key) table; serialization follows this order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("hyper.alpha", hdbl(&HyperParams::alpha));
    t.emplace_back("hyper.temperature", hdbl(&HyperParams::temperature));
    t.emplace_back("hyper.gamma", hdbl(&HyperParams::gamma));
    t.emplace_back("hyper.overlay_p", hdbl(&HyperParams::overlay_p));
    t.emplace_back("hyper.attention_power",
                   Field{[](RunConfig& c, const std::string& v) {
                           c.hyper.attention_power = static_cast<int>(parse_uint<unsigned>("attention_power", v));
                         },
                         [](const RunConfig& c) { return std::to_string(c.hyper.attention_power); }});
    t.emplace_back("hyper.lr", hdbl(&HyperParams::lr));
    t.emplace_back("hyper.epochs", uint_field(&HyperParams::epochs, &RunConfig::hyper));
    t.emplace_back("hyper.batch_size", uint_field(&HyperParams::batch_size, &RunConfig::hyper));
    t.emplace_back("model.family", Field{[](RunConfig& c, const std::string& v) { c.family = parse_family(v); },
                                         [](const RunConfig& c) { return family_name(c.family); }});
    t.emplace_back("model.blocks_removed", uint_top(&RunConfig::blocks_removed));
    t.emplace_back("model.teacher_checkpoint", str(&RunConfig::teacher_checkpoint));
    t.emplace_back("data.kind", str(&RunConfig::data_kind));
    t.emplace_back("data.path", str(&RunConfig::data_path));
    t.emplace_back("data.n_per_class", uint_top(&RunConfig::n_per_class));
    t.emplace_back("data.test_per_class", uint_top(&RunConfig::test_per_class));
    t.emplace_back("data.seed", uint_top(&RunConfig::data_seed));
    t.emplace_back("run.method", str(&RunConfig::method));
    t.emplace_back("run.seed", uint_top(&RunConfig::seed));
    t.emplace_back("run.runs", uint_top(&RunConfig::runs));
    t.emplace_back("run.fraction", dbl(&RunConfig::fraction));
    t.emplace_back("run.ig_maps", str(&RunConfig::ig_maps));
    t.emplace_back("run.teacher_outputs", str(&RunConfig::teacher_outputs));
    t.emplace_back("run.output_dir", str(&RunConfig::output_dir));
    return t;
  }();
  return table;
}

const Field* find_field(const std::string& name) {
  for (const auto& [k, f] : fields()) {
    if (k == name) return &f;
  }
  return nullptr;
}

}  // namespace

void RunConfig::validate(bool check_paths) const {
  hyper.validate();
  if (data_kind != "synthetic" && data_kind != "cifar10") {
    throw ConfigError("data.kind must be synthetic or cifar10, got '" + data_kind + "'");
  }
  if (data_kind == "cifar10" && data_path.empty()) throw ConfigError("data.path is required for cifar10");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("run.fraction must lie in (0, 1]");
  if (runs == 0) throw ConfigError("run.runs must be >= 1");
  if (n_per_class == 0 || test_per_class == 0) throw ConfigError("data sizes must be >= 1");
  if (blocks_removed != 0) {
    const auto valid = valid_removals(family);
    if (std::find(valid.begin(), valid.end(), blocks_removed) == valid.end()) {
      throw ConfigError("model.blocks_removed = " + std::to_string(blocks_removed) + " is not a valid student");
    }
  }
  if (!check_paths) return;
  for (const std::string* p : {&teacher_checkpoint, &data_path, &ig_maps, &teacher_outputs}) {
    if (!p->empty() && !std::filesystem::exists(*p)) throw ConfigError("referenced path does not exist: " + *p);
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw, section;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "hyper" && section != "model" && section != "data" && section != "run") {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    if (section.empty()) throw ConfigError(where + "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* f = find_field(section + "." + key);
    if (!f) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    try {
      f->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + section + "." + key + ": " + e.what());
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& [name, f] : fields()) {
    const std::string sec = name.substr(0, name.find('.'));
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << name.substr(name.find('.') + 1) << " = " << f.get(cfg) << '\n';
  }
  return os.str();
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  cfg.validate();
  return cfg;
}

}  // namespace dk
