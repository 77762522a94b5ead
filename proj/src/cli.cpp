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

#include "distillkit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "distillkit/bench.hpp"
#include "distillkit/binio.hpp"
#include "distillkit/checkpoint.hpp"
#include "distillkit/config.hpp"
#include "distillkit/errors.hpp"
#include "distillkit/harness.hpp"
#include "distillkit/report.hpp"

namespace dk {

namespace fs = std::filesystem;

namespace {

// Options bound directly to a RunConfig, so that flags override values
// loaded from --config.
struct Ctx {
  RunConfig cfg;
  std::string family_name = "micronet";
  std::string teacher_out;
  std::string output;
  std::string model_path;
  std::size_t steps = 64;
  bool zero_misclassified = false;
  std::size_t runs_per_cell = 1;
  std::vector<double> alphas, temperatures, overlay_ps, gammas;
  std::vector<std::string> methods{"Student", "KD", "KD & IG", "KD & IG & AT"};
  std::vector<std::string> run_files;
  std::string bench_file;
  std::string baseline = "Student";
  std::optional<double> teacher_accuracy;
  std::size_t warmup = 2, measured = 5;
  std::vector<std::size_t> removals;
  std::string save_student;
  bool print_config = false;
};

std::string fmt(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

void add_data_options(CLI::App* sub, Ctx& c) {
  sub->add_option("--data", c.cfg.data_kind, "dataset kind: synthetic or cifar10");
  sub->add_option("--data-path", c.cfg.data_path, "CIFAR-10 binary directory");
  sub->add_option("--n-per-class", c.cfg.n_per_class, "synthetic training images per class");
  sub->add_option("--test-per-class", c.cfg.test_per_class, "synthetic test images per class");
  sub->add_option("--data-seed", c.cfg.data_seed, "synthetic generator seed");
  sub->add_option("--family", c.family_name, "model family: micronet or mobilenetv2");
  sub->add_option("--out", c.cfg.output_dir, "output directory");
}

void add_hyper_options(CLI::App* sub, Ctx& c) {
  auto& h = c.cfg.hyper;
  sub->add_option("--alpha", h.alpha, "distillation weight");
  sub->add_option("--temperature", h.temperature, "softmax temperature");
  sub->add_option("--gamma", h.gamma, "attention transfer weight");
  sub->add_option("--overlay-p", h.overlay_p, "IG overlay probability");
  sub->add_option("--attention-power", h.attention_power, "exponent of the attention map");
  sub->add_option("--lr", h.lr, "Adam learning rate");
  sub->add_option("--epochs", h.epochs, "training epochs");
  sub->add_option("--batch-size", h.batch_size, "mini-batch size");
}

void add_student_options(CLI::App* sub, Ctx& c) {
  sub->add_option("--blocks-removed", c.cfg.blocks_removed, "inverted-residual blocks removed from the teacher");
  sub->add_option("--teacher", c.cfg.teacher_checkpoint, "teacher checkpoint (DFKG1)");
  sub->add_option("--teacher-outputs", c.cfg.teacher_outputs, "precomputed teacher outputs (DFTL1)");
  sub->add_option("--ig-maps", c.cfg.ig_maps, "precomputed IG maps (DFIG1)");
  sub->add_option("--seed", c.cfg.seed, "run seed");
}

Cifar10 load_data(const RunConfig& cfg) {
  if (cfg.data_kind == "cifar10") return load_cifar10_binary(cfg.data_path);
  SyntheticOptions opt;
  opt.n_per_class = cfg.n_per_class;
  opt.seed = cfg.data_seed;
  return synthetic_splits(opt, cfg.test_per_class);
}

std::string config_id(const std::string& method, std::size_t removed) {
  return method + "@" + std::to_string(removed);
}

fs::path out_path(const Ctx& c, const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  fs::create_directories(c.cfg.output_dir);
  return fs::path(c.cfg.output_dir) / default_name;
}

Model<float> require_teacher(const RunConfig& cfg) {
  if (cfg.teacher_checkpoint.empty()) throw ConfigError("--teacher checkpoint is required");
  Model<float> t = load_checkpoint(cfg.teacher_checkpoint);
  if (t.spec.family != cfg.family) {
    throw ConfigError("teacher checkpoint is a " + family_name(t.spec.family) + " model but --family is " +
                      family_name(cfg.family));
  }
  return t;
}

/// Teacher outputs and IG maps needed by `methods`, loaded or computed.
struct Resources {
  std::optional<TeacherOutputs> teacher;
  std::optional<IGStore> ig;
};

Resources resolve_resources(const RunConfig& cfg, const Dataset& train, const ModelSpec& student,
                            const std::vector<Method>& methods) {
  const bool need_teacher =
      std::any_of(methods.begin(), methods.end(), [](const Method& m) { return m.kd || m.at; });
  const bool need_ig = std::any_of(methods.begin(), methods.end(), [](const Method& m) { return m.ig; });
  Resources r;
  const std::string sha = (need_teacher || need_ig) ? train.checksum() : std::string();
  if (need_teacher) {
    if (!cfg.teacher_outputs.empty()) {
      r.teacher = load_teacher_outputs(cfg.teacher_outputs, sha);
    } else {
      r.teacher = precompute_teacher_outputs(require_teacher(cfg), train, student.attention_source,
                                             cfg.hyper.attention_power);
    }
    if (r.teacher->tap != student.attention_source) {
      throw DataError("teacher outputs were computed at block " + std::to_string(r.teacher->tap) +
                      " but the student taps block " + std::to_string(student.attention_source));
    }
  }
  if (need_ig) {
    if (cfg.ig_maps.empty()) throw ConfigError("IG methods need --ig-maps (run precompute-ig first)");
    const std::string fp = cfg.teacher_checkpoint.empty() ? std::string() : model_fingerprint(require_teacher(cfg));
    r.ig = load_ig_store(cfg.ig_maps, fp, sha);
  }
  return r;
}

std::vector<double> accuracies(const std::vector<RunRecord>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.final_test_accuracy);
  return v;
}

// --- subcommands -----------------------------------------------------------

int cmd_train_teacher(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  Model<float> teacher = instantiate<float>(teacher_spec(c.cfg.family, data.train.num_classes),
                                            derive_seed(c.cfg.seed, {0}));
  TrainOptions opt;
  opt.hyper = c.cfg.hyper;
  opt.seed = c.cfg.seed;
  opt.config_id = "Teacher@0";
  const std::vector<std::size_t> all = [&] {
    std::vector<std::size_t> v(data.train.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
  }();
  const RunRecord rec = train_student(teacher, data.train, all, data.test, nullptr, nullptr, opt);
  const fs::path path = out_path(c, c.teacher_out, "teacher.dfkg");
  save_checkpoint(teacher, path);
  out << "teacher " << teacher.spec.name << " params=" << teacher.parameter_count()
      << " test_accuracy=" << fmt(rec.final_test_accuracy, 4) << " -> " << path.string() << '\n';
  return kExitOk;
}

int cmd_precompute_logits(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  const Model<float> teacher = require_teacher(c.cfg);
  const ModelSpec student = derive_student(teacher.spec, c.cfg.blocks_removed);
  const int tap = c.cfg.blocks_removed == 0 ? -1 : student.attention_source;
  const TeacherOutputs t = precompute_teacher_outputs(teacher, data.train, tap, c.cfg.hyper.attention_power);
  const fs::path path = out_path(c, c.output, "teacher_outputs.dftl");
  save_teacher_outputs(t, path);
  out << "teacher outputs for " << data.train.size() << " images (tap " << tap << ") -> " << path.string() << '\n';
  return kExitOk;
}

int cmd_precompute_ig(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  const Model<float> teacher = require_teacher(c.cfg);
  PrecomputeOptions opt;
  opt.ig.steps = c.steps;
  opt.zero_misclassified = c.zero_misclassified;
  const fs::path path = out_path(c, c.output, "ig_maps.dfig");
  precompute_dataset(teacher, data.train, opt, path);
  out << "IG maps for " << data.train.size() << " images (" << c.steps << " steps) -> " << path.string() << '\n';
  return kExitOk;
}

int cmd_distill(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  const Method method = Method::parse(c.cfg.method);
  const ModelSpec student = derive_student(teacher_spec(c.cfg.family, data.train.num_classes), c.cfg.blocks_removed);
  const Resources res = resolve_resources(c.cfg, data.train, student, {method});
  ExperimentInputs in{&data.train, &data.test, res.teacher ? &*res.teacher : nullptr, res.ig ? &*res.ig : nullptr,
                      student, method, config_id(method.name(), c.cfg.blocks_removed), true};
  std::vector<std::size_t> idx(data.train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<RunRecord> runs;
  for (std::size_t k = 0; k < c.cfg.runs; ++k) {
    const std::uint64_t seed = c.cfg.runs == 1 ? c.cfg.seed : derive_seed(c.cfg.seed, {k});
    if (!c.save_student.empty() && k == 0) {
      Model<float> s = instantiate<float>(student, derive_seed(seed, {0}));
      TrainOptions opt{c.cfg.hyper, method, seed, in.config_id, 1.0, true};
      runs.push_back(train_student(s, data.train, idx, data.test, in.teacher, in.ig, opt));
      save_checkpoint(s, c.save_student);
    } else {
      runs.push_back(make_runner(in)(c.cfg.hyper, idx, seed));
    }
    out << in.config_id << " seed=" << runs.back().seed
        << " test_accuracy=" << fmt(runs.back().final_test_accuracy, 4) << '\n';
  }
  const auto rows = summarize_methods({{method.name(), accuracies(runs)}}, "", std::nullopt);
  write_report(runs, rows, {}, c.cfg.output_dir);
  io::write_text(fs::path(c.cfg.output_dir) / "epochs.csv", epochs_csv(runs));
  return kExitOk;
}

int cmd_grid_search(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  const Method method = Method::parse(c.cfg.method);
  const ModelSpec student = derive_student(teacher_spec(c.cfg.family, data.train.num_classes), c.cfg.blocks_removed);
  const Resources res = resolve_resources(c.cfg, data.train, student, {method});
  GridSpace space = GridSpace::published();
  if (!c.alphas.empty()) space.alphas = c.alphas;
  if (!c.temperatures.empty()) space.temperatures = c.temperatures;
  if (!c.overlay_ps.empty()) space.overlay_ps = c.overlay_ps;
  if (!c.gammas.empty()) space.gammas = c.gammas;
  ExperimentInputs in{&data.train, &data.test, res.teacher ? &*res.teacher : nullptr, res.ig ? &*res.ig : nullptr,
                      student, method, config_id(method.name(), c.cfg.blocks_removed), false};
  const GridResult g = grid_search(space, c.runs_per_cell, c.cfg.hyper, data.train.size(), c.cfg.seed,
                                   make_runner(in));
  fs::create_directories(c.cfg.output_dir);
  io::write_text(fs::path(c.cfg.output_dir) / "grid.csv", grid_csv(g));
  io::write_text(fs::path(c.cfg.output_dir) / "kd_matrix.md", kd_matrix_markdown(g));
  const HyperParams& b = g.cells[g.best].hyper;
  out << "best cell: alpha=" << b.alpha << " T=" << b.temperature << " p=" << b.overlay_p << " gamma=" << b.gamma
      << " mean=" << fmt(g.cells[g.best].summary.mean, 4) << " (" << g.cells.size() << " cells)\n";
  return kExitOk;
}

int cmd_monte_carlo(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  std::vector<Method> methods;
  for (const auto& m : c.methods) methods.push_back(Method::parse(m));
  const ModelSpec student = derive_student(teacher_spec(c.cfg.family, data.train.num_classes), c.cfg.blocks_removed);
  const Resources res = resolve_resources(c.cfg, data.train, student, methods);
  std::vector<RunRecord> all_runs;
  std::vector<std::pair<std::string, std::vector<double>>> per_method;
  std::ostringstream subsets;
  subsets << "run,size,sha256\n";
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    ExperimentInputs in{&data.train, &data.test, res.teacher ? &*res.teacher : nullptr,
                        res.ig ? &*res.ig : nullptr,      student,
                        methods[mi],                      config_id(methods[mi].name(), c.cfg.blocks_removed),
                        false};
    const MonteCarloResult mc =
        monte_carlo(c.cfg.hyper, c.cfg.runs, c.cfg.fraction, data.train.size(), c.cfg.seed, make_runner(in));
    if (mi == 0) {
      for (std::size_t k = 0; k < mc.subsets.size(); ++k) {
        io::ByteWriter w;
        for (std::size_t i : mc.subsets[k]) w.u32(static_cast<std::uint32_t>(i));
        subsets << k << ',' << mc.subsets[k].size() << ',' << io::sha256_hex(w.buffer()) << '\n';
      }
    }
    per_method.emplace_back(methods[mi].name(), accuracies(mc.runs));
    all_runs.insert(all_runs.end(), mc.runs.begin(), mc.runs.end());
    out << methods[mi].name() << ": mean test accuracy " << fmt(100.0 * mean(per_method.back().second), 2)
        << "% over " << mc.runs.size() << " runs\n";
  }
  const auto rows = summarize_methods(per_method, c.baseline, c.teacher_accuracy);
  write_report(all_runs, rows, {}, c.cfg.output_dir);
  const fs::path dir = c.cfg.output_dir;
  io::write_text(dir / "monte_carlo.csv", monte_carlo_csv(rows));
  io::write_text(dir / "normality.csv", normality_csv(rows));
  io::write_text(dir / "subsets.csv", subsets.str());
  return kExitOk;
}

int cmd_bench(Ctx& c, std::ostream& out) {
  BenchOptions opt;
  opt.batch_size = c.cfg.hyper.batch_size;
  opt.warmup = c.warmup;
  opt.measured = c.measured;
  opt.seed = c.cfg.seed;
  const auto removals = c.removals.empty() ? valid_removals(c.cfg.family) : c.removals;
  const auto reports = bench_family(c.cfg.family, removals, opt);
  fs::create_directories(c.cfg.output_dir);
  io::write_text(fs::path(c.cfg.output_dir) / "bench.csv", bench_csv(reports));
  io::write_text(fs::path(c.cfg.output_dir) / "models.csv", model_table_csv(reports));
  out << "host: " << reports.front().host << '\n' << bench_csv(reports);
  return kExitOk;
}

int cmd_filtered_eval(Ctx& c, std::ostream& out) {
  const Cifar10 data = load_data(c.cfg);
  const Model<float> teacher = require_teacher(c.cfg);
  if (c.model_path.empty()) throw ConfigError("--model checkpoint is required");
  const Model<float> model = load_checkpoint(c.model_path);
  const FilteredEval fe = filtered_eval(model, data.test, teacher);
  out << "kept " << fe.kept << " of " << fe.total << " test images\n"
      << "raw_accuracy=" << fmt(fe.raw_accuracy, 4) << " balanced_accuracy=" << fmt(fe.balanced_accuracy, 4) << '\n';
  return kExitOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cols;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cols.push_back(cell);
  return cols;
}

int cmd_report(Ctx& c, std::ostream& out) {
  if (c.run_files.empty()) throw ConfigError("report needs at least one --runs file");
  std::vector<RunRecord> records;
  for (const auto& f : c.run_files) {
    const auto bytes = io::read_file(f);
    std::istringstream is(std::string(bytes.begin(), bytes.end()));
    std::string line;
    std::getline(is, line);
    if (line != "config_id,seed,subsample_fraction,final_test_accuracy,wall_time_s") {
      throw DataError(f + ": not a runs.csv file (header '" + line + "')");
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cols = split_csv_line(line);
      if (cols.size() != 5) throw DataError(f + ":" + std::to_string(lineno) + ": expected 5 columns");
      RunRecord r;
      r.config_id = cols[0];
      r.seed = std::stoull(cols[1]);
      r.subsample_fraction = std::stod(cols[2]);
      r.final_test_accuracy = std::stod(cols[3]);
      r.wall_time_s = std::stod(cols[4]);
      records.push_back(r);
    }
  }
  // Group by config id "<method>@<blocks removed>", preserving first appearance.
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == r.config_id; });
    if (it == groups.end()) {
      groups.emplace_back(r.config_id, std::vector<double>{});
      it = groups.end() - 1;
    }
    it->second.push_back(r.final_test_accuracy);
  }
  std::map<std::string, double> speedups;  // keyed by formatted compression factor
  if (!c.bench_file.empty()) {
    const auto bytes = io::read_file(c.bench_file);
    std::istringstream is(std::string(bytes.begin(), bytes.end()));
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      const auto cols = split_csv_line(line);
      if (cols.size() == 3) speedups[cols[0]] = std::stod(cols[2]);
    }
  }
  const ModelSpec teacher = teacher_spec(c.cfg.family);
  std::vector<CurvePoint> curves;
  std::vector<std::pair<std::string, std::vector<double>>> methods;
  const std::string baseline_prefix = c.baseline + "@";
  std::string baseline_id;
  for (const auto& [id, accs] : groups) {
    const auto at = id.rfind('@');
    if (at == std::string::npos) throw DataError("config_id '" + id + "' lacks the @<blocks removed> suffix");
    const std::size_t removed = std::stoul(id.substr(at + 1));
    const double cf = compression_factor(param_count(teacher), param_count(derive_student(teacher, removed)));
    CurvePoint p;
    p.compression_factor = cf;
    p.method = id.substr(0, at);
    p.mean_acc = mean(accs);
    const auto sp = speedups.find(fmt(cf, 4));
    p.speedup = sp == speedups.end() ? std::numeric_limits<double>::quiet_NaN() : sp->second;
    curves.push_back(p);
    methods.emplace_back(id, accs);
    if (id.rfind(baseline_prefix, 0) == 0 && baseline_id.empty()) baseline_id = id;
  }
  std::sort(curves.begin(), curves.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.compression_factor != b.compression_factor ? a.compression_factor < b.compression_factor
                                                        : a.method < b.method;
  });
  const auto rows = summarize_methods(methods, baseline_id, c.teacher_accuracy);
  write_report(records, rows, curves, c.cfg.output_dir);
  out << "report: " << records.size() << " runs, " << rows.size() << " configurations -> " << c.cfg.output_dir
      << '\n';
  return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Ctx c;
  // --config is applied before flag parsing so explicit flags win.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        c.cfg = load_config(args[i + 1]);
      } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
      }
      c.family_name = family_name(c.cfg.family);
    }
  }

  CLI::App app{"distillkit: knowledge distillation with integrated-gradient augmentation", "distillkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  auto* tt = app.add_subcommand("train-teacher", "train a teacher network with cross-entropy");
  add_data_options(tt, c);
  add_hyper_options(tt, c);
  tt->add_option("--seed", c.cfg.seed, "run seed");
  tt->add_option("--output", c.teacher_out, "checkpoint path (default <out>/teacher.dfkg)");

  auto* pl = app.add_subcommand("precompute-logits", "store teacher logits and attention maps");
  add_data_options(pl, c);
  pl->add_option("--teacher", c.cfg.teacher_checkpoint, "teacher checkpoint")->required();
  pl->add_option("--blocks-removed", c.cfg.blocks_removed, "student whose tap block the maps target");
  pl->add_option("--attention-power", c.cfg.hyper.attention_power, "exponent of the attention map");
  pl->add_option("--output", c.output, "output path (default <out>/teacher_outputs.dftl)");

  auto* pi = app.add_subcommand("precompute-ig", "store integrated-gradient maps for the training set");
  add_data_options(pi, c);
  pi->add_option("--teacher", c.cfg.teacher_checkpoint, "teacher checkpoint")->required();
  pi->add_option("--steps", c.steps, "trapezoid intervals along the path");
  pi->add_flag("--zero-misclassified", c.zero_misclassified, "store zero maps for teacher errors");
  pi->add_option("--output", c.output, "output path (default <out>/ig_maps.dfig)");

  auto* di = app.add_subcommand("distill", "train a student");
  add_data_options(di, c);
  add_hyper_options(di, c);
  add_student_options(di, c);
  di->add_option("--method", c.cfg.method, "Student, KD, KD & IG, KD & AT, KD & IG & AT, IG, AT, IG & AT");
  di->add_option("--runs", c.cfg.runs, "independent seeds");
  di->add_option("--save", c.save_student, "save the first run's student checkpoint");

  auto* gs = app.add_subcommand("grid-search", "hyperparameter grid search");
  add_data_options(gs, c);
  add_hyper_options(gs, c);
  add_student_options(gs, c);
  gs->add_option("--method", c.cfg.method, "method to tune");
  gs->add_option("--runs-per-cell", c.runs_per_cell, "seeds per grid cell");
  gs->add_option("--alphas", c.alphas, "alpha values")->delimiter(',');
  gs->add_option("--temperatures", c.temperatures, "temperature values")->delimiter(',');
  gs->add_option("--overlay-ps", c.overlay_ps, "overlay probabilities")->delimiter(',');
  gs->add_option("--gammas", c.gammas, "gamma values")->delimiter(',');

  auto* mc = app.add_subcommand("monte-carlo", "repeated training on random training subsets");
  add_data_options(mc, c);
  add_hyper_options(mc, c);
  add_student_options(mc, c);
  mc->add_option("--runs", c.cfg.runs, "runs per method");
  mc->add_option("--fraction", c.cfg.fraction, "training fraction per run");
  mc->add_option("--methods", c.methods, "methods, comma separated")->delimiter(',');
  mc->add_option("--baseline", c.baseline, "method the paired tests compare against");
  mc->add_option("--teacher-accuracy", c.teacher_accuracy, "teacher accuracy in [0, 1] for delta_acc");

  auto* be = app.add_subcommand("bench", "parameter, memory and latency table");
  be->add_option("--family", c.family_name, "model family");
  be->add_option("--batch-size", c.cfg.hyper.batch_size, "images per batch");
  be->add_option("--warmup", c.warmup, "untimed iterations (>= 1)");
  be->add_option("--measured", c.measured, "timed iterations (>= 5)");
  be->add_option("--removals", c.removals, "students to include")->delimiter(',');
  be->add_option("--seed", c.cfg.seed, "weight and input seed");
  be->add_option("--out", c.cfg.output_dir, "output directory");

  auto* fe = app.add_subcommand("filtered-eval", "accuracy on the samples the teacher gets right");
  add_data_options(fe, c);
  fe->add_option("--teacher", c.cfg.teacher_checkpoint, "teacher checkpoint")->required();
  fe->add_option("--model", c.model_path, "model checkpoint")->required();

  auto* rp = app.add_subcommand("report", "summary tables and accuracy-vs-compression curves");
  rp->add_option("--runs", c.run_files, "runs.csv files")->required();
  rp->add_option("--bench", c.bench_file, "bench.csv for the speedup column");
  rp->add_option("--baseline", c.baseline, "baseline method");
  rp->add_option("--teacher-accuracy", c.teacher_accuracy, "teacher accuracy in [0, 1]");
  rp->add_option("--family", c.family_name, "model family of the runs");
  rp->add_option("--out", c.cfg.output_dir, "output directory");

  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->add_flag("--print-config", c.print_config, "print the resolved configuration and exit");
    sub->add_option("--config", config_path, "key = value configuration file");
  }

  if (args.empty()) {
    err << app.help();
    return kExitConfig;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    c.cfg.family = parse_family(c.family_name);
    if (!c.cfg.method.empty()) (void)Method::parse(c.cfg.method);
    c.cfg.validate(!c.print_config);
    if (c.print_config) {
      out << serialize_config(c.cfg);
      return kExitOk;
    }
    if (tt->parsed()) return cmd_train_teacher(c, out);
    if (pl->parsed()) return cmd_precompute_logits(c, out);
    if (pi->parsed()) return cmd_precompute_ig(c, out);
    if (di->parsed()) return cmd_distill(c, out);
    if (gs->parsed()) return cmd_grid_search(c, out);
    if (mc->parsed()) return cmd_monte_carlo(c, out);
    if (be->parsed()) return cmd_bench(c, out);
    if (fe->parsed()) return cmd_filtered_eval(c, out);
    if (rp->parsed()) return cmd_report(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ShapeError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitConfig;
}

}  // namespace dk
