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

#include "distillkit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string_view>

#include "distillkit/adam.hpp"
#include "distillkit/binio.hpp"
#include "distillkit/checkpoint.hpp"
#include "distillkit/errors.hpp"
#include "distillkit/rng.hpp"

namespace dk {

// --- methods ---------------------------------------------------------------

std::string Method::name() const {
  if (!kd && !ig && !at) return "Student";
  std::string out;
  auto add = [&out](const char* part) { out += out.empty() ? part : std::string(" & ") + part; };
  if (kd) add("KD");
  if (ig) add("IG");
  if (at) add("AT");
  return out;
}

Method Method::parse(const std::string& s) {
  Method m;
  if (s == "Student" || s == "student" || s == "baseline") return m;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, '&')) {
    tok.erase(0, tok.find_first_not_of(" +"));
    tok.erase(tok.find_last_not_of(" +") + 1);
    if (tok == "KD" || tok == "kd") {
      m.kd = true;
    } else if (tok == "IG" || tok == "ig") {
      m.ig = true;
    } else if (tok == "AT" || tok == "at") {
      m.at = true;
    } else {
      throw ConfigError("unknown method component '" + tok + "' in '" + s + "' (use Student, KD, IG, AT joined by &)");
    }
  }
  return m;
}

// --- teacher outputs -------------------------------------------------------

namespace {

constexpr std::string_view kTeacherMagic = "DFTL1";

int argmax_row(const Tensor<float>& logits, std::size_t row) {
  const std::size_t k = logits.dim(1);
  const float* p = logits.data() + row * k;
  return static_cast<int>(std::max_element(p, p + k) - p);
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

TeacherOutputs precompute_teacher_outputs(const Model<float>& teacher, const Dataset& data, int tap,
                                          int attention_power, std::size_t batch) {
  if (data.size() == 0) throw DataError("precompute_teacher_outputs: empty dataset");
  if (batch == 0) throw ConfigError("precompute_teacher_outputs: batch must be positive");
  TeacherOutputs out;
  out.tap = tap;
  out.attention_power = attention_power;
  const std::size_t n = data.size(), k = teacher.spec.num_classes;
  out.logits = Tensor<float>({n, k});
  if (tap >= 0) {
    const auto s = block_output_shape(teacher.spec, tap);
    out.attention = Tensor<float>({n, s[1], s[2]});
  }
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t stop = std::min(n, start + batch);
    std::vector<std::size_t> idx(stop - start);
    std::iota(idx.begin(), idx.end(), start);
    const Tensor<float> x = data.batch_images(idx);
    const ForwardOutput<float> f =
        tap >= 0 ? forward_with_attention(teacher, x, tap) : ForwardOutput<float>{predict(teacher, x), {}};
    std::copy(f.logits.vec().begin(), f.logits.vec().end(), out.logits.data() + start * k);
    if (tap >= 0) {
      const Tensor<float> maps = attention_map(f.attention_source, attention_power);
      std::copy(maps.vec().begin(), maps.vec().end(), out.attention.data() + start * maps.numel() / idx.size());
    }
  }
  out.model_fingerprint = model_fingerprint(teacher);
  out.dataset_sha256 = data.checksum();
  return out;
}

void save_teacher_outputs(const TeacherOutputs& t, const std::filesystem::path& path) {
  io::ByteWriter w;
  w.bytes(kTeacherMagic);
  w.u32(static_cast<std::uint32_t>(t.logits.dim(0)));
  w.u32(static_cast<std::uint32_t>(t.logits.dim(1)));
  w.f32s(t.logits.span());
  w.u32(static_cast<std::uint32_t>(static_cast<std::int32_t>(t.tap)));
  const bool has_maps = !t.attention.empty();
  w.u32(has_maps ? static_cast<std::uint32_t>(t.attention.dim(1)) : 0u);
  w.u32(has_maps ? static_cast<std::uint32_t>(t.attention.dim(2)) : 0u);
  w.f32s(t.attention.span());
  io::write_file(path, w.buffer());
  io::write_text(io::manifest_path(path), io::manifest_text({
                                              {"model_fingerprint", t.model_fingerprint},
                                              {"dataset_sha256", t.dataset_sha256},
                                              {"count", std::to_string(t.logits.dim(0))},
                                              {"tap", std::to_string(t.tap)},
                                              {"attention_power", std::to_string(t.attention_power)},
                                          }));
}

TeacherOutputs load_teacher_outputs(const std::filesystem::path& path, const std::string& expect_dataset_sha256) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes, "teacher output file " + path.string());
  if (r.bytes(kTeacherMagic.size()) != kTeacherMagic) throw DataError(path.string() + ": bad magic (expected DFTL1)");
  TeacherOutputs t;
  const std::size_t n = r.u32(), k = r.u32();
  t.logits = Tensor<float>({n, k});
  for (float& v : t.logits.vec()) v = r.f32();
  t.tap = static_cast<std::int32_t>(r.u32());
  const std::size_t h = r.u32(), w = r.u32();
  if (h * w > 0) {
    t.attention = Tensor<float>({n, h, w});
    for (float& v : t.attention.vec()) v = r.f32();
  }
  if (!r.at_end()) throw DataError(path.string() + ": trailing bytes at offset " + std::to_string(r.offset()));
  const auto mbytes = io::read_file(io::manifest_path(path));
  const auto manifest = io::parse_manifest(std::string(mbytes.begin(), mbytes.end()), "teacher output manifest");
  auto get = [&](const std::string& key) {
    const auto it = manifest.find(key);
    return it == manifest.end() ? std::string() : it->second;
  };
  t.model_fingerprint = get("model_fingerprint");
  t.dataset_sha256 = get("dataset_sha256");
  if (!get("attention_power").empty()) t.attention_power = std::stoi(get("attention_power"));
  if (!expect_dataset_sha256.empty() && t.dataset_sha256 != expect_dataset_sha256) {
    throw DataError(path.string() + ": dataset_sha256 mismatch (manifest " + t.dataset_sha256 + ", expected " +
                    expect_dataset_sha256 + "); recompute the teacher outputs");
  }
  return t;
}

// --- training --------------------------------------------------------------

LossBreakdown loss_and_grads(Model<float>& student, const StepInputs& in, const HyperParams& h, const Method& m,
                             ModelGrads<float>* grads, Mode mode) {
  const bool use_kd = m.kd && h.alpha > 0.0;
  const bool use_at = m.at && h.gamma > 0.0;
  if (use_kd && in.teacher_logits == nullptr) throw ConfigError("KD requested without teacher logits");
  if (use_at && in.teacher_maps == nullptr) throw ConfigError("AT requested without teacher attention maps");
  if (use_at && student.spec.attention_source < 0) throw ConfigError("AT requested but the student has no tap");
  const int tap = use_at ? student.spec.attention_source : -1;

  Tape<float> tape;
  const ForwardOutput<float> f = forward(student, *in.images, mode, grads ? &tape : nullptr, tap);
  const LossAndGrad<float> ce = cross_entropy(f.logits, in.labels);
  double kl = 0.0;
  Tensor<float> dlogits = ce.grad;
  if (use_kd) {
    const LossAndGrad<float> kd = kd_loss(f.logits, *in.teacher_logits, h.temperature);
    kl = kd.value;
    const auto a = static_cast<float>(h.alpha);
    for (std::size_t i = 0; i < dlogits.numel(); ++i) dlogits[i] = (1.0f - a) * ce.grad[i] + a * kd.grad[i];
  }
  double at = 0.0;
  Tensor<float> dtap;
  if (use_at) {
    const Tensor<float> smap = attention_map(f.attention_source, h.attention_power);
    const LossAndGrad<float> al = at_loss(smap, *in.teacher_maps);
    at = al.value;
    if (grads) {
      Tensor<float> dmap = al.grad;
      for (float& v : dmap.vec()) v *= static_cast<float>(h.gamma);
      dtap = attention_map_backward(f.attention_source, h.attention_power, dmap);
    }
  }
  if (grads) *grads = backward(student, tape, dlogits, use_at ? &dtap : nullptr);
  if (!use_kd) return total_loss(ce.value, 0.0, at, 0.0, use_at ? h.gamma : 0.0);
  return total_loss(ce.value, kl, at, h.alpha, use_at ? h.gamma : 0.0);
}

std::vector<int> predict_labels(const Model<float>& model, const Tensor<float>& images, std::size_t batch) {
  const std::size_t n = images.dim(0);
  std::vector<int> out(n);
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t stop = std::min(n, start + batch);
    std::vector<std::size_t> idx(stop - start);
    std::iota(idx.begin(), idx.end(), start);
    const Tensor<float> logits = predict(model, gather_rows(images, idx));
    for (std::size_t i = 0; i < idx.size(); ++i) out[start + i] = argmax_row(logits, i);
  }
  return out;
}

double accuracy(const Model<float>& model, const Dataset& data, std::size_t batch) {
  if (data.size() == 0) throw DataError("accuracy: empty dataset");
  const std::vector<int> pred = predict_labels(model, data.images, batch);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

RunRecord train_student(Model<float>& student, const Dataset& train, std::span<const std::size_t> indices,
                        const Dataset& test, const TeacherOutputs* teacher, const IGStore* ig,
                        const TrainOptions& opt) {
  const HyperParams& h = opt.hyper;
  h.validate();
  const Method& m = opt.method;
  if (indices.empty()) throw DataError("train_student: empty training index set");
  if (m.kd && h.alpha > 0.0) {
    if (!teacher) throw ConfigError("method " + m.name() + " needs precomputed teacher logits");
    if (teacher->logits.dim(0) != train.size()) {
      throw DataError("teacher logits have " + std::to_string(teacher->logits.dim(0)) + " rows but the dataset has " +
                      std::to_string(train.size()) + " images");
    }
  }
  if (m.at && h.gamma > 0.0) {
    if (!teacher || teacher->attention.empty()) throw ConfigError("method " + m.name() + " needs teacher attention maps");
    const auto s = block_output_shape(student.spec, student.spec.attention_source);
    require_shape({teacher->attention.dim(1), teacher->attention.dim(2)}, {s[1], s[2]}, "teacher attention maps");
    if (teacher->attention.dim(0) != train.size()) throw DataError("teacher attention maps are not index-aligned");
  }
  if (m.ig) {
    if (!ig) throw ConfigError("method " + m.name() + " needs an IG map store");
    if (ig->count != train.size()) {
      throw DataError("IG store has " + std::to_string(ig->count) + " maps but the dataset has " +
                      std::to_string(train.size()) + " images");
    }
  }

  AugmentPolicy policy;
  policy.overlay_p = h.overlay_p;
  policy.rng_seed = derive_seed(opt.seed, {2});
  policy.validate();

  RunRecord rec;
  rec.config_id = opt.config_id;
  rec.seed = opt.seed;
  rec.subsample_fraction = opt.subsample_fraction;
  const auto t0 = std::chrono::steady_clock::now();

  AdamState<float> adam;
  AdamConfig acfg;
  acfg.lr = h.lr;
  std::vector<Tensor<float>*> pptr;
  for (auto& p : student.params) pptr.push_back(&p);
  std::vector<std::size_t> order(indices.begin(), indices.end());

  for (std::size_t epoch = 0; epoch < h.epochs; ++epoch) {
    // Fisher-Yates with a per-epoch stream, independent of the augmentation stream.
    Rng shuffle(derive_seed(opt.seed, {1, epoch}));
    order.assign(indices.begin(), indices.end());
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle() % i]);

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += h.batch_size) {
      const std::size_t stop = std::min(order.size(), start + h.batch_size);
      if (stop - start < 2) continue;  // batch statistics need two samples
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      Tensor<float> x = train.batch_images(idx);
      if (m.ig) x = augment_batch(x, idx, *ig, policy, epoch);
      const std::vector<int> y = train.batch_labels(idx);
      Tensor<float> tl, tm;
      StepInputs in{&x, y};
      if (teacher && !teacher->logits.empty()) {
        tl = gather_rows(teacher->logits, idx);
        in.teacher_logits = &tl;
      }
      if (teacher && !teacher->attention.empty()) {
        tm = gather_rows(teacher->attention, idx);
        in.teacher_maps = &tm;
      }
      ModelGrads<float> g;
      const LossBreakdown lb = loss_and_grads(student, in, h, m, &g);
      if (!std::isfinite(lb.total)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                           std::to_string(start));
      }
      std::vector<const Tensor<float>*> gptr;
      for (const auto& t : g.params) gptr.push_back(&t);
      adam_step<float>(pptr, gptr, adam, acfg);
      loss_sum += lb.total * static_cast<double>(idx.size());
      seen += idx.size();
    }
    EpochStat es;
    es.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    if (opt.evaluate_each_epoch || epoch + 1 == h.epochs) es.test_accuracy = accuracy(student, test);
    rec.epoch_curve.push_back(es);
  }
  rec.final_test_accuracy = h.epochs ? rec.epoch_curve.back().test_accuracy : accuracy(student, test);
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

RunFn make_runner(const ExperimentInputs& in) {
  if (!in.train || !in.test) throw ConfigError("make_runner: train and test datasets are required");
  return [in](const HyperParams& h, std::span<const std::size_t> indices, std::uint64_t seed) {
    Model<float> student = instantiate<float>(in.student, derive_seed(seed, {0}));
    TrainOptions opt;
    opt.hyper = h;
    opt.method = in.method;
    opt.seed = seed;
    opt.config_id = in.config_id.empty() ? in.method.name() : in.config_id;
    opt.subsample_fraction = static_cast<double>(indices.size()) / static_cast<double>(in.train->size());
    opt.evaluate_each_epoch = in.evaluate_each_epoch;
    return train_student(student, *in.train, indices, *in.test, in.teacher, in.ig, opt);
  };
}

// --- grid search -----------------------------------------------------------

std::size_t GridSpace::cells() const {
  return temperatures.size() * alphas.size() * overlay_ps.size() * gammas.size();
}

GridSpace GridSpace::published() {
  return {
      {1.5, 2.0, 2.5, 3.0, 4.0},
      {0.0005, 0.005, 0.01, 0.025, 0.05, 0.075, 0.09, 0.1, 0.25},
      {0.5, 0.25, 0.2, 0.15, 0.1, 0.09},
      {0.9, 0.8, 0.75, 0.7, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.1},
  };
}

GridResult grid_search(const GridSpace& space, std::size_t runs_per_cell, const HyperParams& base,
                       std::size_t n_train, std::uint64_t base_seed, const RunFn& run) {
  if (space.cells() == 0) throw ConfigError("grid_search: empty search space");
  if (runs_per_cell == 0) throw ConfigError("grid_search: runs_per_cell must be positive");
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto alphas = sorted(space.alphas), temps = sorted(space.temperatures), ps = sorted(space.overlay_ps),
             gammas = sorted(space.gammas);
  const std::vector<std::size_t> all = iota_indices(n_train);
  GridResult res;
  double best = -std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    for (double t : temps) {
      for (double p : ps) {
        for (double g : gammas) {
          GridCell cell;
          cell.hyper = base;
          cell.hyper.alpha = a;
          cell.hyper.temperature = t;
          cell.hyper.overlay_p = p;
          cell.hyper.gamma = g;
          std::vector<double> accs;
          for (std::size_t k = 0; k < runs_per_cell; ++k) {
            cell.runs.push_back(run(cell.hyper, all, derive_seed(base_seed, {k})));
            accs.push_back(cell.runs.back().final_test_accuracy);
          }
          cell.summary = summarize(accs);
          // Strict comparison keeps the earliest cell, i.e. the lower alpha, then lower T.
          if (cell.summary.mean > best) {
            best = cell.summary.mean;
            res.best = res.cells.size();
          }
          res.cells.push_back(std::move(cell));
        }
      }
    }
  }
  return res;
}

// --- Monte Carlo -----------------------------------------------------------

namespace {

// floor(fraction * n), tolerant of products like 0.29 * 100 = 28.999999999999996.
std::size_t subset_size(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::vector<std::size_t> monte_carlo_subset(std::size_t n, double fraction, std::uint64_t master_seed,
                                            std::size_t k) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("subsample fraction must lie in (0, 1]");
  const std::size_t m = subset_size(n, fraction);
  std::vector<std::size_t> perm = iota_indices(n);
  Rng rng(derive_seed(master_seed, {k}));
  // Partial Fisher-Yates: the first m slots are a uniform m-subset.
  for (std::size_t i = 0; i < m; ++i) std::swap(perm[i], perm[i + rng() % (n - i)]);
  perm.resize(m);
  std::sort(perm.begin(), perm.end());
  return perm;
}

MonteCarloResult monte_carlo(const HyperParams& hyper, std::size_t n_runs, double fraction, std::size_t n_train,
                             std::uint64_t master_seed, const RunFn& run) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("subsample fraction must lie in (0, 1]");
  const std::size_t m = subset_size(n_train, fraction);
  if (m < hyper.batch_size) {
    throw ConfigError("monte_carlo: fraction * N = " + std::to_string(m) + " is smaller than the batch size " +
                      std::to_string(hyper.batch_size));
  }
  MonteCarloResult res;
  for (std::size_t k = 0; k < n_runs; ++k) {
    res.subsets.push_back(monte_carlo_subset(n_train, fraction, master_seed, k));
    RunRecord r = run(hyper, res.subsets.back(), derive_seed(master_seed, {k, 1}));
    r.subsample_fraction = fraction;
    res.runs.push_back(std::move(r));
  }
  return res;
}

// --- filtered evaluation ---------------------------------------------------

FilteredEval filtered_eval_from_predictions(std::span<const int> labels, std::span<const int> teacher_pred,
                                            std::span<const int> model_pred, std::size_t num_classes) {
  if (labels.size() != teacher_pred.size() || labels.size() != model_pred.size()) {
    throw ShapeError("filtered_eval: label and prediction counts differ");
  }
  FilteredEval fe;
  fe.total = labels.size();
  std::vector<std::size_t> hit(num_classes, 0), count(num_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (teacher_pred[i] != labels[i]) continue;
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= num_classes) throw DataError("filtered_eval: label " + std::to_string(labels[i]) + " out of range");
    ++fe.kept;
    ++count[c];
    if (model_pred[i] == labels[i]) {
      ++hit[c];
      ++correct;
    }
  }
  if (fe.kept == 0) throw DataError("filtered_eval: the teacher classifies no sample correctly");
  fe.raw_accuracy = static_cast<double>(correct) / static_cast<double>(fe.kept);
  fe.per_class_recall.assign(num_classes, std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (count[c] == 0) continue;
    fe.per_class_recall[c] = static_cast<double>(hit[c]) / static_cast<double>(count[c]);
    sum += fe.per_class_recall[c];
    ++present;
  }
  fe.balanced_accuracy = sum / static_cast<double>(present);
  return fe;
}

FilteredEval filtered_eval(const Model<float>& model, const Dataset& data, const Model<float>& teacher) {
  if (model.spec.input_shape != teacher.spec.input_shape) {
    throw ShapeError("filtered_eval: model and teacher input shapes differ");
  }
  const std::vector<int> tp = predict_labels(teacher, data.images);
  const std::vector<int> mp = &model == &teacher ? tp : predict_labels(model, data.images);
  return filtered_eval_from_predictions(data.labels, tp, mp, data.num_classes);
}

}  // namespace dk
