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

// Attribution-overlay augmentation. Per image:
//   s ~ exp(U[ln s_min, ln s_max])            power applied to the stored map
//   m = normalize(ig^s) into [0, 1]           constant maps become zeros
//   with probability p: x <- 0.5 x + 0.5 m    m repeated across channels

#include <cstdint>
#include <span>

#include "distillkit/ig.hpp"
#include "distillkit/rng.hpp"
#include "distillkit/tensor.hpp"

namespace dk {

struct AugmentPolicy {
  double overlay_p = 0.1;
  double scale_min = 1.0;
  double scale_max = 2.0;
  double blend_image = 0.5;
  double blend_map = 0.5;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Consumes exactly one engine value.
double sample_scale(Rng& rng, const AugmentPolicy& policy);

/// Elementwise ig^s. Negative entries are rejected: they mean a signed,
/// un-aggregated map was passed.
Tensor<float> scale_map(const Tensor<float>& ig, double s);

/// Min-max normalization to [0, 1]; a constant map becomes all zeros.
Tensor<float> normalize_map(const Tensor<float>& v);

/// The blend itself, applied unconditionally. x: C x H x W, map: H x W.
Tensor<float> blend_overlay(const Tensor<float>& x, const Tensor<float>& map, const AugmentPolicy& policy);

/// Applies blend_overlay with probability overlay_p, else returns x. The
/// Bernoulli decision consumes exactly one engine value.
Tensor<float> overlay(const Tensor<float>& x, const Tensor<float>& map, Rng& rng, const AugmentPolicy& policy);

/// Augments a batch whose rows are dataset images `dataset_indices`. Each
/// image gets its own stream derived from (policy.rng_seed, epoch, index), so
/// results do not depend on batch composition or processing order.
Tensor<float> augment_batch(const Tensor<float>& batch, std::span<const std::size_t> dataset_indices,
                            const IGStore& store, const AugmentPolicy& policy, std::uint64_t epoch);

}  // namespace dk
