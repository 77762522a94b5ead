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

// Parameter, memory and latency accounting for a model family.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "distillkit/netblocks.hpp"

namespace dk {

/// Monotonic clock reading in seconds.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

/// CPU model string and active SIMD path, e.g. "Intel Xeon ... / avx2".
std::string host_descriptor();

struct LatencyStats {
  double mean_s = 0.0;
  double std_s = 0.0;
  std::size_t measured = 0;
  std::string host;
};

/// Eval-mode forward passes over `batch`: `warmup` untimed, then `measured`
/// timed iterations. Requires warmup >= 1 and measured >= 5.
LatencyStats time_inference(const Model<float>& model, const Tensor<float>& batch, std::size_t warmup,
                            std::size_t measured, const Clock& clock = steady_clock_seconds());

/// Parameter storage only; activations and workspace are not included.
std::size_t memory_estimate(const ModelSpec& spec, std::size_t bytes_per_element = 4);
std::size_t memory_estimate(std::size_t param_count, std::size_t bytes_per_element = 4);
inline double bytes_to_kb(std::size_t bytes) { return static_cast<double>(bytes) / 1024.0; }

struct BenchReport {
  std::string model_id;
  std::size_t blocks_removed = 0;
  std::size_t param_count = 0;
  std::size_t layer_count = 0;
  std::size_t est_memory_bytes = 0;
  double compression_factor = 1.0;
  double mean_batch_latency_s = 0.0;
  double latency_std = 0.0;
  double speedup_vs_reference = 1.0;  // reference latency / model latency
  std::string host;
};

struct BenchOptions {
  std::size_t batch_size = 64;
  std::size_t warmup = 2;
  std::size_t measured = 5;
  std::uint64_t seed = 0;
};

/// Benchmarks the teacher (reference, first row) and each student derived by
/// removing `removals[i]` blocks, on one random input batch.
std::vector<BenchReport> bench_family(Family family, const std::vector<std::size_t>& removals,
                                      const BenchOptions& opt);

/// compression_factor,seconds_per_batch,speedup
std::string bench_csv(const std::vector<BenchReport>& reports);
/// model_id,layers,param_count,compression_factor,memory_kb
std::string model_table_csv(const std::vector<BenchReport>& reports);

}  // namespace dk
