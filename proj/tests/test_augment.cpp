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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "distillkit/augment.hpp"
#include "support/augment_checks.hpp"

namespace {

using dk::Tensor;

TEST(SampleScale, SupportMedianAndLogUniformShape) {
  dk::Rng rng(1);
  dk::AugmentPolicy pol;
  std::vector<double> s(100000);
  for (auto& v : s) v = dk::sample_scale(rng, pol);
  EXPECT_GE(*std::min_element(s.begin(), s.end()), 1.0);
  EXPECT_LE(*std::max_element(s.begin(), s.end()), 2.0);
  std::nth_element(s.begin(), s.begin() + 50000, s.end());
  EXPECT_NEAR(s[50000], std::sqrt(2.0), 0.01);

  const auto ks = dk::checks::scale_sampler_ks(10000, 2);
  EXPECT_LT(ks.stat, ks.critical);
}

TEST(SampleScale, ConsumesOneEngineValue) {
  dk::Rng a(3), b(3);
  (void)dk::sample_scale(a, {});
  b.discard(1);
  EXPECT_EQ(a(), b());
}

TEST(ScaleMap, ArithmeticAndErrors) {
  const Tensor<float> ig({3}, std::vector<float>{0.25f, 0.5f, 1.0f});
  EXPECT_EQ(dk::scale_map(ig, 2.0).vec(), (std::vector<float>{0.0625f, 0.25f, 1.0f}));
  EXPECT_EQ(dk::scale_map(ig, 1.0).vec(), ig.vec());
  const Tensor<float> fixed({2}, std::vector<float>{0.0f, 1.0f});
  EXPECT_EQ(dk::scale_map(fixed, 1.37).vec(), fixed.vec());
  EXPECT_THROW((void)dk::scale_map(Tensor<float>({1}, -0.1f), 1.5), dk::ShapeError);

  const auto r = dk::oracle::random_tensor<float>({8, 8}, 4, 0.0, 5.0);
  const auto am = std::max_element(r.vec().begin(), r.vec().end()) - r.vec().begin();
  for (double s : {0.3, 1.0, 1.7, 2.0}) {
    const auto m = dk::scale_map(r, s);
    EXPECT_EQ(std::max_element(m.vec().begin(), m.vec().end()) - m.vec().begin(), am);
  }
}

TEST(NormalizeMap, RangeDegenerateAndIdempotence) {
  const Tensor<float> v({3}, std::vector<float>{0.0f, 2.0f, 4.0f});
  EXPECT_EQ(dk::normalize_map(v).vec(), (std::vector<float>{0.0f, 0.5f, 1.0f}));
  const auto flat = dk::normalize_map(Tensor<float>({4}, 3.0f));
  for (float x : flat.vec()) EXPECT_EQ(x, 0.0f);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = dk::oracle::random_tensor<float>({6, 6}, seed, 0.0, 10.0);
    const auto n = dk::normalize_map(r);
    EXPECT_EQ(*std::min_element(n.vec().begin(), n.vec().end()), 0.0f);
    EXPECT_EQ(*std::max_element(n.vec().begin(), n.vec().end()), 1.0f);
    EXPECT_EQ(dk::normalize_map(n), n);
  }
}

TEST(Overlay, ArithmeticRateAndRange) {
  dk::AugmentPolicy pol;
  pol.overlay_p = 1.0;
  dk::Rng rng(5);
  const auto y = dk::overlay(Tensor<float>({3, 2, 2}, 0.2f), Tensor<float>({2, 2}, 0.6f), rng, pol);
  for (float v : y.vec()) EXPECT_FLOAT_EQ(v, 0.4f);

  pol.overlay_p = 0.0;
  const auto x = dk::oracle::random_tensor<float>({3, 4, 4}, 6, 0.0, 1.0);
  EXPECT_EQ(dk::overlay(x, Tensor<float>({4, 4}, 1.0f), rng, pol), x);

  EXPECT_NEAR(dk::checks::overlay_apply_rate(100000, 0.1, 7), 0.1, 0.01);

  const auto r = dk::checks::augmented_range(20000, 8);
  EXPECT_GE(r.min, 0.0f);
  EXPECT_LE(r.max, 1.0f);

  pol.overlay_p = 1.0;
  EXPECT_THROW((void)dk::overlay(Tensor<float>({1, 2, 2}, 1.5f), Tensor<float>({2, 2}), rng, pol), dk::ShapeError);
  EXPECT_THROW((void)dk::overlay(Tensor<float>({1, 2, 2}, 0.5f), Tensor<float>({3, 2}), rng, pol), dk::ShapeError);
}

TEST(AugmentBatch, DeterministicAndOrderIndependent) {
  EXPECT_TRUE(dk::checks::augment_deterministic(9));

  const auto store = dk::checks::random_store(6, 4, 10);
  const auto batch = dk::oracle::random_tensor<float>({6, 3, 4, 4}, 11, 0.0, 1.0);
  dk::AugmentPolicy pol;
  pol.overlay_p = 0.5;
  pol.rng_seed = 12;
  const std::vector<std::size_t> fwd{0, 1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1, 0};
  const auto a = dk::augment_batch(batch, fwd, store, pol, 1);
  const auto b = dk::augment_batch(dk::gather_rows(batch, std::span<const std::size_t>(rev)), rev, store, pol, 1);
  const std::size_t per = 3 * 16;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < per; ++j) EXPECT_EQ(a[i * per + j], b[(5 - i) * per + j]);

  const auto other_epoch = dk::augment_batch(batch, fwd, store, pol, 2);
  EXPECT_FALSE(other_epoch == a);

  pol.overlay_p = 0.0;
  EXPECT_EQ(dk::augment_batch(batch, fwd, store, pol, 1), batch);

  const std::vector<std::size_t> missing{0, 1, 2, 3, 4, 6};
  pol.overlay_p = 0.5;
  EXPECT_THROW((void)dk::augment_batch(batch, missing, store, pol, 1), dk::DataError);
}

TEST(Policy, Validation) {
  dk::AugmentPolicy pol;
  EXPECT_NO_THROW(pol.validate());
  pol.scale_min = 3.0;
  EXPECT_THROW(pol.validate(), dk::ConfigError);
  pol = {};
  pol.blend_image = 0.7;
  EXPECT_THROW(pol.validate(), dk::ConfigError);
  pol = {};
  pol.overlay_p = 1.2;
  EXPECT_THROW(pol.validate(), dk::ConfigError);
}

}  // namespace
