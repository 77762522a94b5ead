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

// Integrated gradients along the straight path from a baseline x' to x:
//
//   IG_i(x) = (x_i - x'_i) * integral_0^1 dF(x' + b (x - x'))/dx_i db
//
// The integral uses the trapezoidal rule on `steps` equal intervals
// (endpoint weights 1/2). The attribution target is the pre-softmax logit
// of the target class unless configured to use its log-probability.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distillkit/dataset.hpp"
#include "distillkit/netblocks.hpp"
#include "distillkit/tensor.hpp"

namespace dk {

enum class IGTarget { kLogit, kLogProb };

struct IGConfig {
  std::size_t steps = 64;
  std::optional<Tensor<double>> baseline;  // C x H x W; all-zeros (black image) when unset
  int target = 0;
  IGTarget target_kind = IGTarget::kLogit;
  std::size_t chunk = 65;  // path points evaluated per forward/backward batch
};

/// Evaluates F and dF/dx on a batch of path points (K x C x H x W).
/// Must fill `values` (K) and `grads` (same shape as `points`).
template <class T>
using BatchGradFn = std::function<void(const Tensor<T>& points, std::vector<double>& values, Tensor<T>& grads)>;

template <class T>
struct PathIntegral {
  Tensor<T> raw;  // C x H x W signed attributions
  double f_input = 0.0;
  double f_baseline = 0.0;
  std::size_t steps = 0;
};

/// Trapezoidal path integral for an arbitrary differentiable function.
/// `x` and `baseline` are C x H x W. Throws NumericError naming the first
/// path step whose gradient is not finite.
template <class T>
PathIntegral<T> integrate_path(const BatchGradFn<T>& fn, const Tensor<T>& x, const Tensor<T>& baseline,
                               std::size_t steps, std::size_t chunk = 65);

/// Adapts a network to BatchGradFn: eval-mode forward, backward of the
/// target logit (or log-probability) to the input.
template <class T>
BatchGradFn<T> model_target_fn(const Model<T>& model, int target, IGTarget kind);

/// Sum over channels of |raw|; raw is C x H x W, result H x W.
template <class T>
Tensor<T> aggregate(const Tensor<T>& raw);

struct AttributionMap {
  Tensor<double> raw;         // C x H x W
  Tensor<double> aggregated;  // H x W
  std::size_t steps_used = 0;
  std::string model_fingerprint;
  int target_class = 0;
  double f_input = 0.0;
  double f_baseline = 0.0;
};

/// IG of `model` at the single image `x` (C x H x W).
template <class T>
AttributionMap integrated_gradients(const Model<T>& model, const Tensor<T>& x, const IGConfig& config);

struct CompletenessResult {
  double residual = 0.0;  // |sum IG - (F(x) - F(x'))| / |F(x) - F(x')|
  double delta_f = 0.0;
  double attribution_sum = 0.0;
  bool degenerate = false;  // |delta_f| below threshold; residual not computed
};

CompletenessResult completeness(const AttributionMap& map, double threshold = 1e-6);

template <class T>
CompletenessResult completeness_check(const Model<T>& model, const Tensor<T>& x, const IGConfig& config,
                                      double threshold = 1e-6);

struct ConvergenceReport {
  double residual_coarse = 0.0;
  double residual_fine = 0.0;
  double ratio = 0.0;
  bool warn = false;  // ratio > 0.5: refinement did not halve the residual
};

/// Compares completeness at `config.steps` and twice that.
template <class T>
ConvergenceReport steps_convergence(const Model<T>& model, const Tensor<T>& x, IGConfig config);

// --- precomputed map store -------------------------------------------------

/// DFIG1 file: "DFIG1", u32 count, u32 H, u32 W, count*H*W little-endian
/// float32. Sidecar "<path>.manifest": key=value lines.
struct IGStore {
  std::size_t count = 0, height = 0, width = 0;
  std::vector<float> maps;
  std::map<std::string, std::string> manifest;

  std::span<const float> map(std::size_t i) const;
};

struct PrecomputeOptions {
  IGConfig ig;                      // target is overridden by each image's label
  bool zero_misclassified = false;  // store all-zero maps for teacher-misclassified images
};

/// Computes one aggregated map per image (target = true label) in dataset
/// order and writes the DFIG1 file plus manifest. Returns the manifest.
std::map<std::string, std::string> precompute_dataset(const Model<float>& model, const Dataset& data,
                                                      const PrecomputeOptions& opt,
                                                      const std::filesystem::path& out_path);

std::vector<std::uint8_t> encode_ig_store(const IGStore& store);
IGStore decode_ig_store(std::span<const std::uint8_t> bytes);

/// Loads and verifies a store. When given, fingerprint and dataset checksum
/// must match the manifest or a DataError is raised.
IGStore load_ig_store(const std::filesystem::path& path, const std::string& expect_fingerprint = {},
                      const std::string& expect_dataset_sha256 = {});

}  // namespace dk
