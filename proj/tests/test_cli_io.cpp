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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "distillkit/binio.hpp"
#include "distillkit/cli.hpp"
#include "distillkit/config.hpp"
#include "distillkit/dataset.hpp"
#include "distillkit/report.hpp"

namespace {

using namespace dk;
namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& child) const { return (path_ / child).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::uint8_t> cifar_records(const std::vector<std::uint8_t>& labels, std::uint8_t pixel_base) {
  std::vector<std::uint8_t> b;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    b.push_back(labels[r]);
    for (std::size_t i = 0; i < 3072; ++i) b.push_back(static_cast<std::uint8_t>((pixel_base + r + i) % 256));
  }
  return b;
}

TEST(Cifar, DecodesRecordsChannelPlanar) {
  const auto bytes = cifar_records({3, 7}, 10);
  const Dataset d = decode_cifar10_batch(bytes, "mem", 100);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.labels, (std::vector<int>{3, 7}));
  EXPECT_EQ(d.ids, (std::vector<std::uint32_t>{100, 101}));
  // Record 1, green plane (offset 1024), row 2, column 5.
  const std::size_t i = 1024 + 2 * 32 + 5;
  EXPECT_FLOAT_EQ(d.images.at(1, 1, 2, 5), static_cast<float>((10 + 1 + i) % 256) / 255.0f);
  EXPECT_EQ(d.image_shape(), (Shape{3, 32, 32}));
}

TEST(Cifar, ZeroRecordAndTruncation) {
  const std::vector<std::uint8_t> zero(kCifarRecordBytes, 0);
  const Dataset d = decode_cifar10_batch(zero, "zero");
  EXPECT_EQ(d.labels[0], 0);
  for (float v : d.images.vec()) EXPECT_EQ(v, 0.0f);

  auto bytes = cifar_records({1, 2}, 0);
  bytes.resize(bytes.size() - 100);
  try {
    (void)decode_cifar10_batch(bytes, "cut.bin");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 3073"), std::string::npos) << e.what();
  }
  auto bad_label = cifar_records({12}, 0);
  EXPECT_THROW((void)decode_cifar10_batch(bad_label, "label.bin"), DataError);
}

TEST(Cifar, LoadsDirectoryWithStableIds) {
  TempDir dir("dk_test_cifar");
  for (int b = 1; b <= 5; ++b) {
    io::write_file(dir.path() / ("data_batch_" + std::to_string(b) + ".bin"),
                   cifar_records({static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(b + 1)},
                                 static_cast<std::uint8_t>(b)));
  }
  io::write_file(dir.path() / "test_batch.bin", cifar_records({0, 9, 4}, 50));
  const Cifar10 a = load_cifar10_binary(dir.path());
  EXPECT_EQ(a.train.size(), 10u);
  EXPECT_EQ(a.test.size(), 3u);
  EXPECT_EQ(a.train.split, "train");
  EXPECT_EQ(a.test.split, "test");
  EXPECT_EQ(a.train.ids.back(), 9u);
  for (float v : a.train.images.vec()) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
  const Cifar10 b = load_cifar10_binary(dir.path());
  EXPECT_EQ(a.train.checksum(), b.train.checksum());
  EXPECT_EQ(a.train.ids, b.train.ids);

  fs::remove(dir.path() / "data_batch_3.bin");
  EXPECT_THROW((void)load_cifar10_binary(dir.path()), DataError);
}

TEST(Synthetic, DeterministicBalancedInRange) {
  SyntheticOptions o;
  o.n_per_class = 6;
  o.seed = 3;
  const Dataset a = generate_synthetic(o), b = generate_synthetic(o);
  EXPECT_EQ(a.checksum(), b.checksum());
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.class_counts(), std::vector<std::size_t>(10, 6));
  for (float v : a.images.vec()) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
  o.seed = 4;
  EXPECT_NE(generate_synthetic(o).checksum(), a.checksum());
}

TEST(Synthetic, SmallerSetIsAPrefixAndSplitsAreDisjoint) {
  SyntheticOptions o;
  o.seed = 8;
  o.n_per_class = 3;
  const Dataset small = generate_synthetic(o);
  o.n_per_class = 5;
  const Dataset big = generate_synthetic(o);
  EXPECT_TRUE(std::equal(small.images.vec().begin(), small.images.vec().end(), big.images.vec().begin()));
  EXPECT_TRUE(std::equal(small.labels.begin(), small.labels.end(), big.labels.begin()));

  const Cifar10 s = synthetic_splits(o, 2);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.test.ids.front(), 50u);
  EXPECT_NE(s.test.checksum(), s.train.checksum());
}

TEST(Config, RoundTripAndErrors) {
  RunConfig c;
  c.hyper.alpha = 0.0005;
  c.hyper.temperature = 1.5;
  c.hyper.gamma = 0.1;
  c.hyper.overlay_p = 0.09;
  c.hyper.lr = 3e-4;
  c.hyper.epochs = 40;
  c.hyper.batch_size = 32;
  c.family = Family::kMobileNetV2;
  c.blocks_removed = 10;
  c.method = "KD & IG & AT";
  c.seed = 1234567890123ULL;
  c.runs = 60;
  c.fraction = 0.8;
  c.output_dir = "some dir/with spaces";
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  EXPECT_EQ(parse_config(serialize_config(RunConfig{})), RunConfig{});

  const RunConfig p = parse_config("# comment\n[hyper]\nalpha = 0.25   # trailing\n\n[run]\nruns=3\n");
  EXPECT_EQ(p.hyper.alpha, 0.25);
  EXPECT_EQ(p.runs, 3u);

  try {
    (void)parse_config("[hyper]\nalpha = 0.1\nalhpa = 0.2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("alhpa"), std::string::npos) << e.what();
  }
  EXPECT_THROW((void)parse_config("[optimizer]\nlr = 1\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[hyper]\nepochs = -3\n"), ConfigError);
  EXPECT_THROW((void)parse_config("alpha = 0.1\n"), ConfigError);

  RunConfig missing;
  missing.ig_maps = "/nonexistent/maps.dfig";
  EXPECT_THROW(missing.validate(), ConfigError);
  EXPECT_NO_THROW(missing.validate(false));
}

TEST(Report, HeadersOnlyAndByteIdenticalReruns) {
  TempDir a("dk_test_report_a"), b("dk_test_report_b");
  write_report({}, {}, {}, a.path() / "empty");
  EXPECT_EQ(slurp(a.path() / "empty" / "runs.csv"),
            "config_id,seed,subsample_fraction,final_test_accuracy,wall_time_s\n");
  EXPECT_EQ(slurp(a.path() / "empty" / "summary.csv"), "method,delta_acc,max,min,mean,std,t_stat,p_value\n");
  EXPECT_EQ(slurp(a.path() / "empty" / "curves.tsv"), "compression_factor\tmethod\tmean_acc\tspeedup\n");

  std::vector<RunRecord> runs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    runs[i].config_id = "KD@2";
    runs[i].seed = i;
    runs[i].final_test_accuracy = 0.8 + 0.01 * static_cast<double>(i);
  }
  const auto rows = summarize_methods({{"Student", {0.70, 0.72, 0.71}}, {"KD", {0.80, 0.81, 0.82}}}, "Student", 0.9);
  const std::vector<CurvePoint> curve{{2.19, "KD", 0.81, 1.8}};
  write_report(runs, rows, curve, a.path());
  write_report(runs, rows, curve, b.path());
  for (const char* f : {"runs.csv", "summary.csv", "curves.tsv"}) EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
  EXPECT_EQ(monte_carlo_csv(rows).substr(0, monte_carlo_csv(rows).find('\n')), "Method,Mean,Std Dev,t-statistic,p-value");

  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].t_stat.has_value());
  ASSERT_TRUE(rows[1].t_stat.has_value());
  ASSERT_TRUE(rows[1].delta_acc.has_value());
  EXPECT_NEAR(*rows[1].delta_acc, 82.0 - 90.0, 1e-9);

  io::write_text(a.path() / "blocker", "x");
  EXPECT_THROW(write_report(runs, rows, curve, a.path() / "blocker" / "sub"), DataError);
}

TEST(Cli, UsageAndExitCodes) {
  const auto none = run_cli({});
  EXPECT_EQ(none.code, kExitConfig);
  EXPECT_NE(none.err.find("Usage"), std::string::npos);

  const auto unknown = run_cli({"distill", "--no-such-flag"});
  EXPECT_EQ(unknown.code, kExitConfig);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);

  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"distill", "--alpha", "1.5"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"distill", "--method", "KD & XX"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"distill", "--ig-maps", "/nonexistent.dfig"}).code, kExitConfig);

  TempDir dir("dk_test_cli_codes");
  io::write_text(dir.path() / "junk.dfkg", "not a checkpoint");
  const auto bad = run_cli({"precompute-logits", "--teacher", dir.str("junk.dfkg"), "--out", dir.str("o")});
  EXPECT_EQ(bad.code, kExitData) << bad.err;

  fs::create_directories(dir.path() / "cifar");
  io::write_text(dir.path() / "cifar" / "data_batch_1.bin", "short");
  EXPECT_EQ(run_cli({"train-teacher", "--data", "cifar10", "--data-path", dir.str("cifar")}).code, kExitData);

  io::write_text(dir.path() / "bad.cfg", "[hyper]\nbogus = 1\n");
  EXPECT_EQ(run_cli({"distill", "--config", dir.str("bad.cfg")}).code, kExitConfig);
}

TEST(Cli, FlagsReachTheConfiguration) {
  const auto r = run_cli({"distill", "--alpha", "0.01", "--temperature", "2.5", "--overlay-p", "0.1", "--gamma", "0.8",
                          "--print-config"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(parse_config(r.out).hyper, HyperParams::published_optimal());

  const auto mc = run_cli({"monte-carlo", "--runs", "60", "--fraction", "0.8", "--print-config"});
  ASSERT_EQ(mc.code, kExitOk) << mc.err;
  const RunConfig c = parse_config(mc.out);
  EXPECT_EQ(c.runs, 60u);
  EXPECT_EQ(c.fraction, 0.8);
  EXPECT_EQ(c.hyper.batch_size, 64u);

  TempDir dir("dk_test_cli_cfg");
  io::write_text(dir.path() / "run.cfg", "[hyper]\nalpha = 0.3\ntemperature = 4\n[run]\nseed = 17\n");
  const auto over = run_cli({"distill", "--config", dir.str("run.cfg"), "--temperature", "3", "--print-config"});
  ASSERT_EQ(over.code, kExitOk) << over.err;
  const RunConfig o = parse_config(over.out);
  EXPECT_EQ(o.hyper.alpha, 0.3);
  EXPECT_EQ(o.hyper.temperature, 3.0);
  EXPECT_EQ(o.seed, 17u);
}

TEST(Cli, EndToEndPipelineIsDeterministic) {
  TempDir dir("dk_test_cli_e2e");
  const std::vector<std::string> data{"--n-per-class", "3", "--test-per-class", "2", "--data-seed", "5"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.begin() + 1, data.begin(), data.end());
    return run_cli(a);
  };
  const auto tt = with({"train-teacher", "--epochs", "1", "--batch-size", "8", "--out", dir.str("t")});
  ASSERT_EQ(tt.code, kExitOk) << tt.err;
  const std::string teacher = dir.str("t/teacher.dfkg");
  ASSERT_TRUE(fs::exists(teacher));

  const auto ig = with({"precompute-ig", "--teacher", teacher, "--steps", "2", "--out", dir.str("t")});
  ASSERT_EQ(ig.code, kExitOk) << ig.err;
  ASSERT_TRUE(fs::exists(dir.path() / "t" / "ig_maps.dfig.manifest"));

  const std::vector<std::string> distill{"distill",    "--teacher", teacher, "--ig-maps", dir.str("t/ig_maps.dfig"),
                                         "--method",   "KD & IG & AT", "--epochs", "1", "--batch-size", "8",
                                         "--runs",     "2"};
  auto d1 = distill, d2 = distill;
  d1.insert(d1.end(), {"--out", dir.str("d1")});
  d2.insert(d2.end(), {"--out", dir.str("d2")});
  ASSERT_EQ(with(d1).code, kExitOk);
  ASSERT_EQ(with(d2).code, kExitOk);
  EXPECT_EQ(slurp(dir.path() / "d1" / "summary.csv"), slurp(dir.path() / "d2" / "summary.csv"));
  auto strip_time = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
    return out;
  };
  EXPECT_EQ(strip_time(slurp(dir.path() / "d1" / "runs.csv")), strip_time(slurp(dir.path() / "d2" / "runs.csv")));

  const auto mc = with({"monte-carlo", "--teacher", teacher, "--ig-maps", dir.str("t/ig_maps.dfig"), "--methods",
                        "Student,KD & IG", "--runs", "3", "--fraction", "0.8", "--epochs", "1", "--batch-size", "8",
                        "--out", dir.str("mc")});
  ASSERT_EQ(mc.code, kExitOk) << mc.err;
  const std::string table = slurp(dir.path() / "mc" / "monte_carlo.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "Method,Mean,Std Dev,t-statistic,p-value");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  const std::string subsets = slurp(dir.path() / "mc" / "subsets.csv");
  EXPECT_NE(subsets.find("0,24,"), std::string::npos) << subsets;

  const auto rep = run_cli({"report", "--runs", dir.str("mc/runs.csv"), "--out", dir.str("rep")});
  ASSERT_EQ(rep.code, kExitOk) << rep.err;
  EXPECT_TRUE(fs::exists(dir.path() / "rep" / "curves.tsv"));

  const auto fe = with({"filtered-eval", "--teacher", teacher, "--model", teacher});
  ASSERT_EQ(fe.code, kExitOk) << fe.err;
}

}  // namespace
