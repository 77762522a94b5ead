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

// Calibration checks for the statistics module, shared by the unit tests and
// the acceptance binary.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "distillkit/rng.hpp"
#include "distillkit/stats.hpp"
#include "support/oracles.hpp"

namespace dk::checks {

struct HandCase {
  double t = 0.0;
  double p = 0.0;
  double p_reference = 0.0;
};

/// Differences d = [1, 2, 3]: t = 2 / (1 / sqrt 3) = 2 sqrt 3.
inline HandCase t_test_hand_case() {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{0.0, 0.0, 0.0};
  const TTestResult r = paired_t_test(a, b);
  return {r.t, r.p, oracle::t_two_sided_p(2.0 * std::sqrt(3.0), 2.0)};
}

/// Share of p < 0.05 when both samples of each pair come from one normal.
inline double t_test_null_rejection_rate(std::size_t sims, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> a(n), b(n);
  std::size_t rejected = 0;
  for (std::size_t s = 0; s < sims; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 0.9 + 0.02 * z(rng);
      b[i] = 0.9 + 0.02 * z(rng);
    }
    rejected += paired_t_test(a, b).p < 0.05;
  }
  return static_cast<double>(rejected) / static_cast<double>(sims);
}

/// Share of trials with Lilliefors p > 0.05 for normal data.
inline double lilliefors_normal_acceptance(std::size_t trials, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(5.0, 2.0);
  std::vector<double> x(n);
  std::size_t accepted = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& v : x) v = z(rng);
    accepted += lilliefors(x).p_value > 0.05;
  }
  return static_cast<double>(accepted) / static_cast<double>(trials);
}

/// Share of trials with Lilliefors p < 0.05 for uniform(0, 1) data.
inline double lilliefors_uniform_rejection(std::size_t trials, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  std::size_t rejected = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& v : x) v = u(rng);
    rejected += lilliefors(x).p_value < 0.05;
  }
  return static_cast<double>(rejected) / static_cast<double>(trials);
}

}  // namespace dk::checks
