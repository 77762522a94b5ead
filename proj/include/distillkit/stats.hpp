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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

namespace dk {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> v);
double median(std::span<const double> v);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
  // All paired differences equal and non-zero: t is +-inf, p is 0.
  bool degenerate = false;
};

/// Two-sided paired t-test on d = a - b, pairing by position.
/// Zero-variance differences: p = 1 exactly when mean(d) == 0, otherwise the
/// degenerate flag is set.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// sup |F_n(x) - F(x)| for the empirical CDF of `samples`.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic one-sample KS critical value at the 5% level.
double ks_critical_value_05(std::size_t n);

double normal_cdf(double z);

struct LillieforsResult {
  double ksstat = 0.0;
  double p_value = 1.0;
  double variance = 0.0;
  std::size_t n = 0;
};

struct LillieforsOptions {
  std::size_t simulations = 10000;
  std::uint64_t seed = 20240229;
};

/// KS statistic against Normal(sample mean, sample sd), with a Monte Carlo
/// p-value from `simulations` standard-normal samples of the same size. The
/// null distribution depends only on (n, simulations, seed) and is cached.
LillieforsResult lilliefors(std::span<const double> samples, const LillieforsOptions& opt = {});

struct StatsSummary {
  std::size_t n = 0;
  double mean = 0.0, median = 0.0, std = 0.0, max = 0.0, min = 0.0;
  std::optional<TTestResult> vs_baseline;
  std::optional<LillieforsResult> normality;  // n >= 4 and non-zero variance
  double ci95_halfwidth = 0.0;                // 1.96 * std / sqrt(n)
};

StatsSummary summarize(std::span<const double> values, std::span<const double> baseline = {},
                       const LillieforsOptions& lopt = {});

/// 100 * (distilled - baseline) / (teacher - baseline).
double relative_delta_acc(double teacher, double baseline, double distilled);

}  // namespace dk
