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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Stochastic criteria use fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "distillkit/bench.hpp"
#include "distillkit/checkpoint.hpp"
#include "distillkit/cli.hpp"
#include "distillkit/dataset.hpp"
#include "distillkit/harness.hpp"
#include "distillkit/ig.hpp"
#include "distillkit/losses.hpp"
#include "distillkit/netblocks.hpp"
#include "distillkit/stats.hpp"
#include "support/augment_checks.hpp"
#include "support/gradcheck_suite.hpp"
#include "support/oracles.hpp"
#include "support/stats_checks.hpp"

namespace {

using namespace dk;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

int cli(const std::vector<std::string>& args, std::string* err_out = nullptr) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  if (err_out) *err_out = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    rows.push_back(cols);
  }
  return rows;
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "distillkit_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// --- 1 ---------------------------------------------------------------------

Verdict gradcheck() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t n = 0;
  for (const auto& c : oracle::gradcheck_cases()) {
    const double e = c.run();
    ++n;
    if (!(e <= worst)) {
      worst = e;
      worst_name = c.name;
    }
  }
  const double secs = seconds_since(t0);
  v.require(worst <= 1e-4, std::to_string(n) + " cases, max rel err " + num(worst) + " (" + worst_name + ")");
  v.require(secs < 30.0, num(secs, 3) + " s");
  return v;
}

// --- 2 ---------------------------------------------------------------------

Verdict teacher_params() {
  Verdict v;
  const ModelSpec t = teacher_spec(Family::kMobileNetV2, 10);
  const std::size_t p = param_count(t);
  const double kb = bytes_to_kb(memory_estimate(p));
  v.require(p == 2236682, "params " + std::to_string(p));
  v.require(std::abs(kb - 8737.0) < 0.5, "memory " + num(kb, 7) + " KB");
  const std::map<std::size_t, double> table{{2, 2.19},   {4, 4.12},   {6, 7.29},    {8, 12.04},
                                            {10, 28.97}, {12, 54.59}, {14, 139.43}, {16, 1121.71}};
  double worst = 0.0;
  for (const auto& [removed, cf_ref] : table) {
    const double cf = compression_factor(p, param_count(derive_student(t, removed)));
    worst = std::max(worst, std::abs(cf - cf_ref) / cf_ref);
  }
  v.require(worst <= 0.01, "8 compression factors, max rel dev " + num(100 * worst, 3) + "%");
  return v;
}

// --- 3 ---------------------------------------------------------------------

// Teacher shared with criteria 7 and 9: MicroNet on 200 synthetic images per class.
const fs::path& teacher_path() {
  static const fs::path p = work_dir() / "teacher" / "teacher.dfkg";
  return p;
}

Verdict ig_completeness() {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  std::string err;
  const int code = cli({"train-teacher", "--n-per-class", "200", "--test-per-class", "50", "--epochs", "20", "--out",
                        (work_dir() / "teacher").string()},
                       &err);
  if (code != 0) {
    v.require(false, "teacher training failed: " + err);
    return v;
  }
  const double train_secs = seconds_since(t0);
  const Model<float> teacher = load_checkpoint(teacher_path());
  SyntheticOptions so;
  so.n_per_class = 200;
  const Cifar10 data = synthetic_splits(so, 50);
  const double acc = accuracy(teacher, data.test);
  v.require(acc >= 0.90, "teacher test accuracy " + num(100 * acc, 4) + "% (" + num(train_secs, 3) + " s training)");

  t0 = std::chrono::steady_clock::now();
  const Model<double> t64 = teacher.cast<double>();
  double sum = 0.0, worst = 0.0;
  std::size_t used = 0, degenerate = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    IGConfig cfg;
    cfg.steps = 512;
    cfg.target = data.test.labels[i];
    const std::vector<std::size_t> one{i};
    const Tensor<double> x = data.test.batch_images(one).cast<double>().reshaped(data.test.image_shape());
    const CompletenessResult c = completeness_check(t64, x, cfg);
    if (c.degenerate) {
      ++degenerate;
      continue;
    }
    sum += c.residual;
    worst = std::max(worst, c.residual);
    ++used;
  }
  const double mean = used ? sum / static_cast<double>(used) : 1.0;
  const double ig_secs = seconds_since(t0);
  v.require(used > 0 && mean <= 0.01, "mean completeness residual " + num(100 * mean, 3) + "% over " +
                                          std::to_string(used) + " images (max " + num(100 * worst, 3) + "%, " +
                                          std::to_string(degenerate) + " degenerate)");

  // Linear model F(x) = <w, x>: attributions are exactly x * w.
  const auto w = oracle::random_tensor<double>({3, 32, 32}, 11);
  const auto x = oracle::random_tensor<double>({3, 32, 32}, 12, 0.0, 1.0);
  const BatchGradFn<double> linear = [&](const Tensor<double>& pts, std::vector<double>& values, Tensor<double>& g) {
    const std::size_t per = w.numel();
    values.assign(pts.dim(0), 0.0);
    for (std::size_t k = 0; k < pts.dim(0); ++k)
      for (std::size_t j = 0; j < per; ++j) {
        values[k] += w[j] * pts[k * per + j];
        g[k * per + j] = w[j];
      }
  };
  // Machine precision here is the rounding bound of summing steps + 1 terms.
  const double eps = std::numeric_limits<double>::epsilon();
  double lin_ratio = 0.0, lin_ulps = 0.0;
  for (std::size_t steps : {1u, 16u, 512u}) {
    const auto r = integrate_path(linear, x, Tensor<double>({3, 32, 32}, 0.0), steps);
    for (std::size_t j = 0; j < x.numel(); ++j) {
      const double want = x[j] * w[j], e = std::abs(r.raw[j] - want);
      if (want == 0.0) continue;
      lin_ratio = std::max(lin_ratio, e / (static_cast<double>(steps + 1) * eps * std::abs(want)));
      lin_ulps = std::max(lin_ulps, e / (eps * std::abs(want)));
    }
  }
  v.require(lin_ratio <= 1.0, "linear model max error " + num(lin_ulps, 3) + " ulp, " + num(lin_ratio, 3) +
                                  " of the summation bound");
  v.require(ig_secs < 120.0, "IG runtime " + num(ig_secs, 3) + " s");
  return v;
}

// --- 4 ---------------------------------------------------------------------

Verdict augmentation() {
  Verdict v;
  const auto r = checks::augmented_range(100000, 41);
  v.require(r.min >= 0.0f && r.max <= 1.0f,
            "range [" + num(r.min) + ", " + num(r.max) + "] over " + std::to_string(r.images) + " images");
  const auto ks = checks::scale_sampler_ks(10000, 42);
  v.require(ks.stat < ks.critical, "scale KS " + num(ks.stat) + " < " + num(ks.critical));
  const double rate = checks::overlay_apply_rate(100000, 0.1, 43);
  v.require(std::abs(rate - 0.1) <= 0.01, "overlay rate " + num(rate));
  v.require(checks::augment_deterministic(44), "seeded byte-determinism");
  return v;
}

// --- 5 ---------------------------------------------------------------------

Verdict loss_oracles() {
  Verdict v;
  double ce_err = 0.0, kd_err = 0.0, self_kd = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = oracle::random_tensor<double>({5, 10}, seed, -12.0, 12.0);
    const std::vector<int> y{1, 3, 0, 9, 5};
    ce_err = std::max(ce_err, std::abs(cross_entropy(z, y).value - static_cast<double>(oracle::hp_cross_entropy(z, y))));
    const auto s = oracle::random_tensor<double>({4, 10}, 100 + seed, -8.0, 8.0);
    const auto t = oracle::random_tensor<double>({4, 10}, 200 + seed, -8.0, 8.0);
    for (double temp : {1.0, 2.5, 4.0, 20.0}) {
      kd_err = std::max(kd_err, std::abs(kd_loss(s, t, temp).value - static_cast<double>(oracle::hp_kd_loss(s, t, temp))));
      self_kd = std::max(self_kd, std::abs(kd_loss(s, s, temp).value));
    }
  }
  const Tensor<double> uniform({4, 10}, 0.3);
  const std::vector<int> y{0, 2, 5, 9};
  const double ln10 = std::abs(cross_entropy(uniform, y).value - std::log(10.0));
  v.require(ce_err <= 1e-10, "cross_entropy vs oracle " + num(ce_err, 3));
  v.require(kd_err <= 1e-10, "kd_loss vs oracle " + num(kd_err, 3));
  v.require(self_kd <= 1e-15, "kd_loss(z, z, T) " + num(self_kd, 3));
  v.require(ln10 <= 1e-12, "uniform CE - ln 10 " + num(ln10, 3));
  return v;
}

// --- 6 ---------------------------------------------------------------------

Verdict stats_oracles() {
  Verdict v;
  const auto h = checks::t_test_hand_case();
  v.require(std::abs(h.t - 3.4641) <= 1e-4, "hand t " + num(h.t, 8));
  v.require(std::abs(h.p - h.p_reference) <= 1e-6, "hand p " + num(h.p, 8) + " vs " + num(h.p_reference, 8));
  const double null_rate = checks::t_test_null_rejection_rate(10000, 10, 61);
  v.require(std::abs(null_rate - 0.05) <= 0.01, "null rejection " + num(null_rate));
  const double acc_normal = checks::lilliefors_normal_acceptance(1000, 100, 62);
  const double rej_uniform = checks::lilliefors_uniform_rejection(1000, 100, 63);
  v.require(acc_normal >= 0.94, "Lilliefors normal acceptance " + num(acc_normal));
  v.require(rej_uniform >= 0.50, "Lilliefors uniform rejection " + num(rej_uniform));
  const double rel = relative_delta_acc(96.14, 94.48, 95.93);
  v.require(std::round(rel * 100.0) / 100.0 == 87.35, "relative delta acc " + num(rel, 8));
  return v;
}

// --- 7 ---------------------------------------------------------------------

Verdict distillation_trend() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = work_dir() / "trend";
  const std::vector<std::string> data{"--n-per-class", "30", "--test-per-class", "50"};
  std::vector<std::string> ig{"precompute-ig", "--teacher", teacher_path().string(), "--out", dir.string()};
  ig.insert(ig.begin() + 1, data.begin(), data.end());
  std::string err;
  if (cli(ig, &err) != 0) {
    v.require(false, "IG precompute failed: " + err);
    return v;
  }
  std::vector<std::string> mc{"monte-carlo", "--teacher", teacher_path().string(), "--ig-maps",
                              (dir / "ig_maps.dfig").string(), "--blocks-removed", "2", "--runs", "10",
                              "--fraction", "1", "--epochs", "40", "--batch-size", "32", "--alpha", "0.5",
                              "--temperature", "4", "--overlay-p", "0.1", "--methods", "Student,KD,KD & IG",
                              "--out", dir.string()};
  mc.insert(mc.begin() + 1, data.begin(), data.end());
  if (cli(mc, &err) != 0) {
    v.require(false, "monte-carlo failed: " + err);
    return v;
  }
  std::map<std::string, std::vector<double>> acc;
  const auto rows = read_csv(dir / "runs.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) acc[rows[i][0]].push_back(std::stod(rows[i][3]));
  const auto& base = acc["Student@2"];
  const auto& kd = acc["KD@2"];
  const auto& kdig = acc["KD & IG@2"];
  if (base.size() != 10 || kd.size() != 10 || kdig.size() != 10) {
    v.require(false, "expected 10 runs per method");
    return v;
  }
  const TTestResult t = paired_t_test(kd, base);
  const double mb = mean(base), mk = mean(kd), mi = mean(kdig);
  const double secs = seconds_since(t0);
  v.require(mk > mb && t.p < 0.05, "Student " + num(100 * mb) + "%, KD " + num(100 * mk) + "% (paired p " + num(t.p, 3) + ")");
  v.require(mi >= mk, "KD & IG " + num(100 * mi) + "%");
  v.require(secs < 1800.0, num(secs / 60.0, 3) + " min");
  return v;
}

// --- 8 ---------------------------------------------------------------------

Verdict latency_ordering() {
  Verdict v;
  BenchOptions opt;
  opt.batch_size = 8;
  opt.warmup = 1;
  opt.measured = 5;
  const auto r = bench_family(Family::kMobileNetV2, {16}, opt);
  const BenchReport& teacher = r.at(0);
  const BenchReport& student = r.at(1);
  v.require(teacher.param_count >= 10 * student.param_count,
            "param gap " + num(static_cast<double>(teacher.param_count) / static_cast<double>(student.param_count)));
  v.require(student.mean_batch_latency_s < teacher.mean_batch_latency_s,
            "student " + num(1e3 * student.mean_batch_latency_s) + " ms < teacher " +
                num(1e3 * teacher.mean_batch_latency_s) + " ms per batch");
  v.require(teacher.speedup_vs_reference == 1.0, "teacher self-speedup " + num(teacher.speedup_vs_reference));
  const int full = cli({"monte-carlo", "--runs", "60", "--fraction", "0.8", "--epochs", "100", "--batch-size", "64",
                        "--family", "mobilenetv2", "--print-config"});
  v.require(full == 0, "full-scale configuration accepted");
  return v;
}

// --- 9 ---------------------------------------------------------------------

Verdict monte_carlo_protocol() {
  Verdict v;
  auto run = [&](const std::string& name) {
    return cli({"monte-carlo", "--n-per-class", "10", "--test-per-class", "5", "--teacher", teacher_path().string(),
                "--runs", "6", "--fraction", "0.8", "--epochs", "1", "--batch-size", "16", "--methods", "Student,KD",
                "--out", (work_dir() / name).string()});
  };
  if (run("mc_a") != 0 || run("mc_b") != 0) {
    v.require(false, "monte-carlo command failed");
    return v;
  }
  const auto subsets = read_csv(work_dir() / "mc_a" / "subsets.csv");
  std::set<std::string> hashes;
  bool sizes = subsets.size() == 7;
  for (std::size_t i = 1; i < subsets.size(); ++i) {
    sizes = sizes && subsets[i][1] == "80";
    hashes.insert(subsets[i][2]);
  }
  v.require(sizes, "6 subsets of 80 = floor(0.8 * 100)");
  v.require(hashes.size() == 6, "subsets distinct");
  v.require(slurp(work_dir() / "mc_a" / "subsets.csv") == slurp(work_dir() / "mc_b" / "subsets.csv"),
            "subsets reproducible from the master seed");

  // Library level at CIFAR-10 training-set size.
  bool unique = true, distinct = true;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t k = 0; k < 6; ++k) {
    auto s = monte_carlo_subset(50000, 0.8, 7, k);
    std::sort(s.begin(), s.end());
    unique = unique && s.size() == 40000 && std::adjacent_find(s.begin(), s.end()) == s.end() && s.back() < 50000;
    distinct = seen.insert(s).second && distinct;
  }
  v.require(unique && distinct, "N=50000: 6 distinct subsets of 40000 unique indices");

  const auto table = read_csv(work_dir() / "mc_a" / "monte_carlo.csv");
  const std::vector<std::string> header{"Method", "Mean", "Std Dev", "t-statistic", "p-value"};
  v.require(!table.empty() && table[0] == header && table.size() == 3, "summary columns Method,Mean,Std Dev,t,p");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradcheck suite", gradcheck},
      {"teacher parameters and compression factors", teacher_params},
      {"IG completeness", ig_completeness},
      {"augmentation pipeline", augmentation},
      {"loss oracles", loss_oracles},
      {"statistics oracles", stats_oracles},
      {"distillation trend", distillation_trend},
      {"desk-scale substitutes: ordinal latency", latency_ordering},
      {"Monte Carlo protocol", monte_carlo_protocol},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work_dir());
  return failed == 0 ? 0 : 1;
}
