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

#include "support/gradcheck_suite.hpp"

namespace dk {
namespace {

class GradCheck : public ::testing::TestWithParam<oracle::GradCase> {};

TEST_P(GradCheck, MatchesCentralDifferences) {
  const double err = GetParam().run();
  EXPECT_LE(err, 1e-4) << GetParam().name;
}

std::string case_name(const ::testing::TestParamInfo<oracle::GradCase>& info) {
  std::string s;
  for (char ch : info.param.name) s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return s + "_" + std::to_string(info.index);
}

INSTANTIATE_TEST_SUITE_P(AllPrimitives, GradCheck, ::testing::ValuesIn(oracle::gradcheck_cases()), case_name);

}  // namespace
}  // namespace dk
