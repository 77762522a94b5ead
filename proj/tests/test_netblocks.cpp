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

#include <cmath>
#include <filesystem>
#include <tuple>
#include <vector>

#include "distillkit/bench.hpp"
#include "distillkit/checkpoint.hpp"
#include "distillkit/netblocks.hpp"
#include "support/oracles.hpp"

namespace {

using namespace dk;

// Closed-form count written from the published stage table, independent of
// the library's block builder: (expansion, channels, repeats).
std::size_t mobilenet_count_oracle(std::size_t retained_ir, bool head, std::size_t classes) {
  const std::size_t stages[][3] = {{1, 16, 1}, {6, 24, 2}, {6, 32, 3}, {6, 64, 4}, {6, 96, 3}, {6, 160, 3}, {6, 320, 1}};
  std::size_t total = 3 * 32 * 9 + 2 * 32;
  std::size_t in = 32, used = 0;
  for (const auto& s : stages) {
    for (std::size_t r = 0; r < s[2] && used < retained_ir; ++r, ++used) {
      const std::size_t hid = in * s[0];
      if (s[0] != 1) total += in * hid + 2 * hid;
      total += 9 * hid + 2 * hid;
      total += hid * s[1] + 2 * s[1];
      in = s[1];
    }
  }
  if (head) {
    total += in * 1280 + 2 * 1280;
    in = 1280;
  }
  return total + in * classes + classes;
}

TEST(Teacher, ParameterCountAndMemory) {
  const ModelSpec t = teacher_spec(Family::kMobileNetV2);
  EXPECT_EQ(param_count(t), 2236682u);
  EXPECT_EQ(mobilenet_count_oracle(17, true, 10), 2236682u);
  EXPECT_EQ(t.inverted_residual_count(), 17u);
  EXPECT_EQ(t.output_features(), 1280u);
  EXPECT_EQ(layer_count(t), 53u);
  EXPECT_EQ(memory_estimate(t), 8946728u);
  EXPECT_EQ(std::lround(bytes_to_kb(memory_estimate(t))), 8737);
  EXPECT_EQ(build_teacher<float>(10).parameter_count(), 2236682u);
}

struct StudentRow {
  std::size_t removed;
  double published_cf;
  int source;
  std::size_t features;
  std::size_t layers;
};

class MobileNetStudents : public ::testing::TestWithParam<StudentRow> {};

TEST_P(MobileNetStudents, MatchPublishedTable) {
  const StudentRow r = GetParam();
  const ModelSpec t = teacher_spec(Family::kMobileNetV2);
  const ModelSpec s = derive_student(t, r.removed);
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(s.inverted_residual_count(), 17 - r.removed);
  EXPECT_EQ(param_count(s), mobilenet_count_oracle(17 - r.removed, false, 10));
  const double cf = compression_factor(param_count(t), param_count(s));
  EXPECT_LT(std::abs(cf - r.published_cf) / r.published_cf, 0.01) << cf;
  EXPECT_EQ(s.attention_source, r.source);
  EXPECT_EQ(s.output_features(), r.features);
  EXPECT_EQ(layer_count(s), r.layers);
  for (std::size_t i = 0; i + 1 < s.blocks.size(); ++i) EXPECT_EQ(s.blocks[i], t.blocks[i]) << i;
}

INSTANTIATE_TEST_SUITE_P(TableRows, MobileNetStudents,
                         ::testing::Values(StudentRow{2, 2.19, 9, 160, 46}, StudentRow{4, 4.12, 9, 96, 40},
                                           StudentRow{6, 7.29, 9, 96, 34}, StudentRow{8, 12.04, 4, 64, 28},
                                           StudentRow{10, 28.97, 4, 64, 22}, StudentRow{12, 54.59, 4, 32, 16},
                                           StudentRow{14, 139.43, 2, 24, 10}, StudentRow{16, 1121.71, 0, 16, 4}));

TEST(Students, ExactEndpointsAndMonotoneCompression) {
  const ModelSpec t = teacher_spec(Family::kMobileNetV2);
  EXPECT_EQ(param_count(derive_student(t, 2)), 1019402u);
  EXPECT_EQ(param_count(derive_student(t, 16)), 1994u);
  EXPECT_EQ(derive_student(t, 0), t);
  double prev = 1.0;
  for (std::size_t n : valid_removals(Family::kMobileNetV2)) {
    const double cf = compression_factor(param_count(t), param_count(derive_student(t, n)));
    EXPECT_GT(cf, prev);
    prev = cf;
  }
  EXPECT_DOUBLE_EQ(compression_factor(param_count(t), param_count(t)), 1.0);
}

TEST(Students, InvalidRemovalListsValidChoices) {
  const ModelSpec t = teacher_spec(Family::kMobileNetV2);
  try {
    (void)derive_student(t, 3);
    FAIL() << "expected an error";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos) << e.what();
  }
  EXPECT_THROW((void)derive_student(t, 17), ShapeError);
}

TEST(MicroNet, CountsAndAttentionTable) {
  const ModelSpec t = teacher_spec(Family::kMicroNet);
  EXPECT_EQ(param_count(t), 26586u);
  EXPECT_EQ(layer_count(t), 20u);
  const std::vector<std::tuple<std::size_t, std::size_t, int>> rows{
      {1, 14506, 3}, {2, 8602, 3}, {3, 5082, 3}, {4, 2170, 2}, {5, 874, 0}};
  for (const auto& [n, params, src] : rows) {
    const ModelSpec s = derive_student(t, n);
    EXPECT_EQ(param_count(s), params) << n;
    EXPECT_EQ(s.attention_source, src) << n;
  }
}

TEST(Attention, SourceDimsAgreeBetweenTeacherAndStudent) {
  const ModelSpec t = teacher_spec(Family::kMobileNetV2);
  const ModelSpec s = derive_student(t, 2);
  EXPECT_EQ(block_output_shape(t, 9), block_output_shape(s, 9));
  // Stride-1 stem, stride-2 stages at 24->32, 32->64 and 96->160 channels.
  EXPECT_EQ(block_output_shape(t, 0), (std::array<std::size_t, 3>{32, 32, 32}));
  EXPECT_EQ(block_output_shape(t, 9), (std::array<std::size_t, 3>{64, 8, 8}));
  EXPECT_EQ(block_output_shape(t, 17), (std::array<std::size_t, 3>{320, 4, 4}));
}

TEST(Forward, SharedPrefixGivesIdenticalAttentionActivations) {
  const Model<float> teacher = build_teacher<float>(10, Family::kMicroNet, 1);
  Model<float> student = instantiate<float>(derive_student(teacher.spec, 2), 2);
  EXPECT_GT(copy_shared_weights(teacher, student), 0u);
  const auto x = oracle::random_tensor<float>({3, 3, 32, 32}, 5, 0.0, 1.0);
  const auto a = forward_with_attention(teacher, x, student.spec.attention_source);
  const auto b = forward_with_attention(student, x);
  EXPECT_EQ(a.attention_source, b.attention_source);
  EXPECT_EQ(a.logits, predict(teacher, x));
  EXPECT_THROW((void)forward_with_attention(teacher, x), ShapeError);
}

TEST(Forward, IdenticalImagesGiveIdenticalRowsAndZeroClassifierGivesBias) {
  Model<float> m = build_teacher<float>(10, Family::kMicroNet, 3);
  auto one = oracle::random_tensor<float>({1, 3, 32, 32}, 6, 0.0, 1.0);
  Tensor<float> x({2, 3, 32, 32});
  std::copy(one.vec().begin(), one.vec().end(), x.vec().begin());
  std::copy(one.vec().begin(), one.vec().end(), x.vec().begin() + static_cast<long>(one.numel()));
  const auto y = predict(m, x);
  for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(y[j], y[10 + j]);

  m.param("classifier.w").fill(0.0f);
  for (std::size_t j = 0; j < 10; ++j) m.param("classifier.b")[j] = static_cast<float>(j) * 0.5f;
  const auto z = predict(m, x);
  for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(z[j], static_cast<float>(j) * 0.5f);
  EXPECT_THROW((void)predict(m, Tensor<float>({1, 3, 16, 16})), ShapeError);
}

TEST(Forward, MatchesPrimitiveComposition) {
  // MicroNet with five blocks removed: stem, one t=1 InvertedResidual, classifier.
  const ModelSpec spec = derive_student(teacher_spec(Family::kMicroNet), 5);
  Model<double> m = instantiate<double>(spec, 7);
  for (auto& b : m.bn_running) {
    b.mean = oracle::random_tensor<double>(b.mean.shape(), 8, -0.2, 0.2);
    b.var = oracle::random_tensor<double>(b.var.shape(), 9, 0.5, 1.5);
  }
  const auto x = oracle::random_tensor<double>({2, 3, 32, 32}, 10, 0.0, 1.0);

  auto bn_relu = [&](Tensor<double> y, const std::string& p, std::size_t bn, bool act) {
    const auto& g = m.param(p + ".bn.gamma");
    const auto& be = m.param(p + ".bn.beta");
    const std::size_t c = y.dim(1), hw = y.dim(2) * y.dim(3);
    for (std::size_t n = 0; n < y.dim(0); ++n)
      for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < hw; ++i) {
          double& v = y[(n * c + ch) * hw + i];
          v = g[ch] * (v - m.bn_running[bn].mean[ch]) / std::sqrt(m.bn_running[bn].var[ch] + kBatchNormEps) + be[ch];
          if (act) v = std::min(std::max(v, 0.0), 6.0);
        }
    return y;
  };
  auto h = bn_relu(oracle::naive_conv2d(x, m.param("f0.conv.w"), 2, 1, false), "f0", 0, true);
  h = bn_relu(oracle::naive_conv2d(h, m.param("f1.dw.conv.w"), 1, 1, true), "f1.dw", 1, true);
  h = bn_relu(oracle::naive_conv2d(h, m.param("f1.project.conv.w"), 1, 0, false), "f1.project", 2, false);
  const std::size_t d = h.dim(1), hw = h.dim(2) * h.dim(3);
  const auto& w = m.param("classifier.w");
  const auto& b = m.param("classifier.b");
  const auto got = predict(m, x);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t k = 0; k < 10; ++k) {
      double acc = b[k];
      for (std::size_t c = 0; c < d; ++c) {
        double s = 0;
        for (std::size_t i = 0; i < hw; ++i) s += h[(n * d + c) * hw + i];
        acc += s / static_cast<double>(hw) * w[c * 10 + k];
      }
      EXPECT_NEAR(got[n * 10 + k], acc, 1e-6);
    }
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  Model<float> m = build_teacher<float>(10, Family::kMicroNet, 11);
  m.bn_running[0].mean[0] = 0.25f;
  const auto bytes = serialize_checkpoint(m);
  const Model<float> back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.spec, m.spec);
  EXPECT_EQ(back.param_names, m.param_names);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.bn_running[0].mean, m.bn_running[0].mean);
  EXPECT_EQ(model_fingerprint(back), model_fingerprint(m));
  EXPECT_EQ(model_fingerprint(m).size(), 64u);
  EXPECT_EQ(spec_from_json(spec_to_json(m.spec)), m.spec);

  Model<float> other = m;
  other.params[0][0] += 1.0f;
  EXPECT_NE(model_fingerprint(other), model_fingerprint(m));

  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW((void)deserialize_checkpoint(truncated), DataError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW((void)deserialize_checkpoint(bad_magic), DataError);

  const auto path = std::filesystem::temp_directory_path() / "dk_test_netblocks.dfkg";
  save_checkpoint(m, path);
  EXPECT_EQ(load_checkpoint(path).params, m.params);
  std::filesystem::remove(path);
}

TEST(Instantiate, DeterministicInSeed) {
  const ModelSpec s = teacher_spec(Family::kMicroNet);
  EXPECT_EQ(instantiate<float>(s, 4).params, instantiate<float>(s, 4).params);
  EXPECT_NE(instantiate<float>(s, 4).params, instantiate<float>(s, 5).params);
}

}  // namespace
