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

#include "distillkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "distillkit/errors.hpp"
#include "distillkit/rng.hpp"

namespace dk {

double mean(std::span<const double> v) {
  if (v.empty()) throw ShapeError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::span<const double> v) {
  if (v.empty()) throw ShapeError("median of an empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("paired_t_test: samples have different lengths (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw ShapeError("paired_t_test: need at least 2 pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  TTestResult r;
  r.df = d.size() - 1;
  const double md = mean(d);
  const double sd = stddev(d);
  if (sd == 0.0) {
    if (md == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = md > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
      r.degenerate = true;
    }
    return r;
  }
  r.t = md / (sd / std::sqrt(static_cast<double>(d.size())));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(r.df));
  return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ShapeError("ks_statistic of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value_05(std::size_t n) { return 1.3581 / std::sqrt(static_cast<double>(n)); }

namespace {

double lilliefors_stat(std::span<const double> x) {
  const double m = mean(x);
  const double sd = stddev(x);
  return ks_statistic(x, [m, sd](double v) { return normal_cdf((v - m) / sd); });
}

// Sorted null distribution of the statistic for (n, simulations, seed).
const std::vector<double>& null_distribution(std::size_t n, const LillieforsOptions& opt) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(n, opt.simulations, opt.seed);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Rng rng(derive_seed(opt.seed, {n}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> stats(opt.simulations);
  std::vector<double> x(n);
  for (double& s : stats) {
    for (double& v : x) v = gauss(rng);
    s = lilliefors_stat(x);
  }
  std::sort(stats.begin(), stats.end());
  return cache.emplace(key, std::move(stats)).first->second;
}

}  // namespace

LillieforsResult lilliefors(std::span<const double> samples, const LillieforsOptions& opt) {
  if (samples.size() < 4) throw ShapeError("lilliefors: need at least 4 samples");
  if (opt.simulations == 0) throw ShapeError("lilliefors: simulations must be positive");
  LillieforsResult r;
  r.n = samples.size();
  const double sd = stddev(samples);
  if (sd == 0.0) throw ShapeError("lilliefors: sample variance is zero");
  r.variance = sd * sd;
  r.ksstat = lilliefors_stat(samples);
  const auto& null = null_distribution(samples.size(), opt);
  const auto ge = static_cast<std::size_t>(null.end() - std::lower_bound(null.begin(), null.end(), r.ksstat));
  r.p_value = static_cast<double>(ge + 1) / static_cast<double>(null.size() + 1);
  return r;
}

StatsSummary summarize(std::span<const double> values, std::span<const double> baseline,
                       const LillieforsOptions& lopt) {
  if (values.empty()) throw ShapeError("summarize: no values");
  StatsSummary s;
  s.n = values.size();
  s.mean = mean(values);
  s.median = median(values);
  s.std = stddev(values);
  s.max = *std::max_element(values.begin(), values.end());
  s.min = *std::min_element(values.begin(), values.end());
  s.ci95_halfwidth = 1.96 * s.std / std::sqrt(static_cast<double>(s.n));
  if (!baseline.empty()) s.vs_baseline = paired_t_test(values, baseline);
  if (s.n >= 4 && s.std > 0.0) s.normality = lilliefors(values, lopt);
  return s;
}

double relative_delta_acc(double teacher, double baseline, double distilled) {
  if (teacher == baseline) throw ShapeError("relative_delta_acc: teacher and baseline accuracies are equal");
  return 100.0 * (distilled - baseline) / (teacher - baseline);
}

}  // namespace dk
