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

#include "distillkit/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "distillkit/errors.hpp"
#include "distillkit/rng.hpp"
#include "distillkit/simd.hpp"
#include "distillkit/stats.hpp"

namespace dk {

Clock steady_clock_seconds() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

std::string host_descriptor() {
  std::string cpu = "unknown-cpu";
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  return cpu + " / " + std::string(simd::isa_name(simd::active_isa()));
}

LatencyStats time_inference(const Model<float>& model, const Tensor<float>& batch, std::size_t warmup,
                            std::size_t measured, const Clock& clock) {
  if (warmup < 1) throw ConfigError("time_inference: warmup must be at least 1");
  if (measured < 5) throw ConfigError("time_inference: measured iterations must be at least 5");
  for (std::size_t i = 0; i < warmup; ++i) (void)predict(model, batch);
  std::vector<double> times;
  times.reserve(measured);
  for (std::size_t i = 0; i < measured; ++i) {
    const double t0 = clock();
    (void)predict(model, batch);
    times.push_back(clock() - t0);
  }
  LatencyStats s;
  s.mean_s = mean(times);
  s.std_s = stddev(times);
  s.measured = measured;
  s.host = host_descriptor();
  return s;
}

std::size_t memory_estimate(std::size_t param_count, std::size_t bytes_per_element) {
  return param_count * bytes_per_element;
}

std::size_t memory_estimate(const ModelSpec& spec, std::size_t bytes_per_element) {
  return memory_estimate(param_count(spec), bytes_per_element);
}

std::vector<BenchReport> bench_family(Family family, const std::vector<std::size_t>& removals,
                                      const BenchOptions& opt) {
  const ModelSpec teacher = teacher_spec(family);
  const std::size_t teacher_params = param_count(teacher);
  Tensor<float> batch({opt.batch_size, teacher.input_shape[0], teacher.input_shape[1], teacher.input_shape[2]});
  Rng rng(derive_seed(opt.seed, {0}));
  for (float& v : batch.vec()) v = static_cast<float>(unit_draw(rng));

  std::vector<BenchReport> out;
  std::vector<std::size_t> all{0};
  all.insert(all.end(), removals.begin(), removals.end());
  for (std::size_t removed : all) {
    const ModelSpec spec = derive_student(teacher, removed);
    const Model<float> model = instantiate<float>(spec, derive_seed(opt.seed, {1, removed}));
    const LatencyStats lat = time_inference(model, batch, opt.warmup, opt.measured);
    BenchReport r;
    r.model_id = removed == 0 ? "teacher" : "student-" + std::to_string(removed);
    r.blocks_removed = removed;
    r.param_count = param_count(spec);
    r.layer_count = layer_count(spec);
    r.est_memory_bytes = memory_estimate(r.param_count);
    r.compression_factor = compression_factor(teacher_params, r.param_count);
    r.mean_batch_latency_s = lat.mean_s;
    r.latency_std = lat.std_s;
    r.host = lat.host;
    out.push_back(r);
  }
  const double ref = out.front().mean_batch_latency_s;
  for (auto& r : out) r.speedup_vs_reference = ref / r.mean_batch_latency_s;
  return out;
}

std::string bench_csv(const std::vector<BenchReport>& reports) {
  std::ostringstream os;
  os << "compression_factor,seconds_per_batch,speedup\n";
  for (const auto& r : reports) {
    os << std::fixed << std::setprecision(4) << r.compression_factor << ',' << std::setprecision(6)
       << r.mean_batch_latency_s << ',' << std::setprecision(4) << r.speedup_vs_reference << '\n';
  }
  return os.str();
}

std::string model_table_csv(const std::vector<BenchReport>& reports) {
  std::ostringstream os;
  os << "model_id,layers,param_count,compression_factor,memory_kb\n";
  for (const auto& r : reports) {
    os << r.model_id << ',' << r.layer_count << ',' << r.param_count << ',' << std::fixed << std::setprecision(4)
       << r.compression_factor << ',' << std::setprecision(0) << std::round(bytes_to_kb(r.est_memory_bytes)) << '\n';
  }
  return os.str();
}

}  // namespace dk
