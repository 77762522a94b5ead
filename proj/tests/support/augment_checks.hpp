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

// Augmentation property checks shared by the unit tests and the acceptance
// binary. Each returns the measured quantity; callers apply the bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "distillkit/augment.hpp"
#include "distillkit/rng.hpp"
#include "support/oracles.hpp"

namespace dk::checks {

struct RangeResult {
  float min = 1.0f, max = 0.0f;
  std::size_t images = 0;
};

/// Runs scale -> normalize -> forced overlay on random images and random
/// nonnegative maps of widely varying magnitude.
inline RangeResult augmented_range(std::size_t images, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AugmentPolicy pol;
  pol.overlay_p = 1.0;
  RangeResult r;
  Tensor<float> x({3, 8, 8}), ig({8, 8});
  for (std::size_t n = 0; n < images; ++n) {
    for (auto& v : x.vec()) v = static_cast<float>(u(rng));
    const double mag = std::pow(10.0, 6.0 * u(rng) - 3.0);
    for (auto& v : ig.vec()) v = static_cast<float>(mag * u(rng));
    const double s = sample_scale(rng, pol);
    const auto y = overlay(x, normalize_map(scale_map(ig, s)), rng, pol);
    const auto [mn, mx] = std::minmax_element(y.vec().begin(), y.vec().end());
    r.min = std::min(r.min, *mn);
    r.max = std::max(r.max, *mx);
    ++r.images;
  }
  return r;
}

struct KsResult {
  double stat = 0.0;
  double critical = 0.0;  // 1.358 / sqrt(n)
};

/// KS distance between sampled scales and the log-uniform CDF on [1, 2].
inline KsResult scale_sampler_ks(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  AugmentPolicy pol;
  std::vector<double> s(n);
  for (auto& v : s) v = sample_scale(rng, pol);
  const auto cdf = [](double v) { return std::clamp(std::log(v) / std::log(2.0), 0.0, 1.0); };
  return {oracle::ks_stat(s, cdf), 1.358 / std::sqrt(static_cast<double>(n))};
}

/// Fraction of draws for which overlay() changed the image.
inline double overlay_apply_rate(std::size_t draws, double p, std::uint64_t seed) {
  Rng rng(seed);
  AugmentPolicy pol;
  pol.overlay_p = p;
  const Tensor<float> x({1, 2, 2}, 0.2f), m({2, 2}, 0.6f);
  std::size_t applied = 0;
  for (std::size_t i = 0; i < draws; ++i) applied += overlay(x, m, rng, pol)[0] != 0.2f;
  return static_cast<double>(applied) / static_cast<double>(draws);
}

inline IGStore random_store(std::size_t count, std::size_t hw, std::uint64_t seed) {
  IGStore s;
  s.count = count;
  s.height = s.width = hw;
  Rng rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 3.0f);
  s.maps.resize(count * hw * hw);
  for (auto& v : s.maps) v = u(rng);
  return s;
}

/// Two augment_batch calls with the same seed give byte-identical output,
/// and a different seed changes it.
inline bool augment_deterministic(std::uint64_t seed) {
  const IGStore store = random_store(16, 8, seed);
  const auto batch = oracle::random_tensor<float>({16, 3, 8, 8}, seed + 1, 0.0, 1.0);
  std::vector<std::size_t> idx(16);
  for (std::size_t i = 0; i < 16; ++i) idx[i] = i;
  AugmentPolicy pol;
  pol.overlay_p = 0.5;
  pol.rng_seed = seed;
  const auto a = augment_batch(batch, idx, store, pol, 3);
  const auto b = augment_batch(batch, idx, store, pol, 3);
  pol.rng_seed = seed + 1;
  const auto c = augment_batch(batch, idx, store, pol, 3);
  return a == b && !(a == c);
}

}  // namespace dk::checks
