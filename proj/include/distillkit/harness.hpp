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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distillkit/augment.hpp"
#include "distillkit/dataset.hpp"
#include "distillkit/ig.hpp"
#include "distillkit/losses.hpp"
#include "distillkit/netblocks.hpp"
#include "distillkit/stats.hpp"

namespace dk {

/// Which knowledge-transfer components a run uses.
struct Method {
  bool kd = false;
  bool ig = false;
  bool at = false;

  std::string name() const;  // "Student", "KD", "KD & IG", "KD & IG & AT", ...
  static Method parse(const std::string& s);
  friend bool operator==(const Method&, const Method&) = default;
};

struct EpochStat {
  double train_loss = 0.0;
  double test_accuracy = 0.0;
};

struct RunRecord {
  std::string config_id;
  std::uint64_t seed = 0;
  double subsample_fraction = 1.0;
  std::vector<EpochStat> epoch_curve;
  double final_test_accuracy = 0.0;
  double wall_time_s = 0.0;
};

/// Teacher outputs precomputed once in eval mode, index-aligned with a dataset.
struct TeacherOutputs {
  Tensor<float> logits;      // N x K
  Tensor<float> attention;   // N x H' x W' attention maps, empty when no tap
  int tap = -1;
  int attention_power = 2;
  std::string model_fingerprint;
  std::string dataset_sha256;
};

TeacherOutputs precompute_teacher_outputs(const Model<float>& teacher, const Dataset& data, int tap = -1,
                                          int attention_power = 2, std::size_t batch = 256);

/// "DFTL1" file: magic, u32 N, u32 K, N*K float32 logits, i32 tap, u32 H,
/// u32 W, N*H*W float32 maps (H = W = 0 when no tap); sidecar manifest.
void save_teacher_outputs(const TeacherOutputs& t, const std::filesystem::path& path);
TeacherOutputs load_teacher_outputs(const std::filesystem::path& path, const std::string& expect_dataset_sha256 = {});

struct TrainOptions {
  HyperParams hyper;
  Method method;
  std::uint64_t seed = 0;
  std::string config_id;
  double subsample_fraction = 1.0;
  bool evaluate_each_epoch = true;
};

/// Adam training of `student` on `train[indices]`. Loss is cross-entropy
/// alone (no KD), the KD objective, or the KD + attention objective; IG
/// overlay is applied when the method requests it. `teacher` and `ig` are
/// aligned with the full `train` dataset. Deterministic in `opt.seed`.
RunRecord train_student(Model<float>& student, const Dataset& train, std::span<const std::size_t> indices,
                        const Dataset& test, const TeacherOutputs* teacher, const IGStore* ig,
                        const TrainOptions& opt);

/// Single training step on one batch; returns the loss before the update.
/// Exposed for step-level tests.
struct StepInputs {
  const Tensor<float>* images;
  std::span<const int> labels;
  const Tensor<float>* teacher_logits = nullptr;  // batch rows
  const Tensor<float>* teacher_maps = nullptr;    // batch rows
};
LossBreakdown loss_and_grads(Model<float>& student, const StepInputs& in, const HyperParams& h, const Method& m,
                             ModelGrads<float>* grads, Mode mode = Mode::kTrain);

double accuracy(const Model<float>& model, const Dataset& data, std::size_t batch = 256);
std::vector<int> predict_labels(const Model<float>& model, const Tensor<float>& images, std::size_t batch = 256);

// --- experiment drivers ------------------------------------------------------

/// Trains one run for (hyperparameters, training subset, seed).
using RunFn = std::function<RunRecord(const HyperParams&, std::span<const std::size_t>, std::uint64_t)>;

/// Everything a run needs besides (hyperparameters, subset, seed). Pointers
/// must outlive the returned RunFn.
struct ExperimentInputs {
  const Dataset* train = nullptr;
  const Dataset* test = nullptr;
  const TeacherOutputs* teacher = nullptr;
  const IGStore* ig = nullptr;
  ModelSpec student;
  Method method;
  std::string config_id;
  bool evaluate_each_epoch = false;
};

/// Each call instantiates a fresh student from derive_seed(seed, {0}) and
/// trains it with train_student. Paired runs with equal seeds share the
/// initialization and the batch order.
RunFn make_runner(const ExperimentInputs& in);

struct GridSpace {
  std::vector<double> temperatures;
  std::vector<double> alphas;
  std::vector<double> overlay_ps;
  std::vector<double> gammas;

  std::size_t cells() const;
  /// Search ranges used for the reported optimization.
  static GridSpace published();
};

struct GridCell {
  HyperParams hyper;
  std::vector<RunRecord> runs;
  StatsSummary summary;
};

struct GridResult {
  std::vector<GridCell> cells;  // ordered by (alpha, T, p, gamma) ascending
  std::size_t best = 0;         // max mean accuracy; ties -> lower alpha, then lower T
};

/// Run k of every cell uses seed derive_seed(base_seed, {k}), so cells are
/// paired by seed.
GridResult grid_search(const GridSpace& space, std::size_t runs_per_cell, const HyperParams& base,
                       std::size_t n_train, std::uint64_t base_seed, const RunFn& run);

/// Subset k: floor(fraction * n) distinct indices drawn without replacement
/// from a stream seeded by (master_seed, k); returned sorted.
std::vector<std::size_t> monte_carlo_subset(std::size_t n, double fraction, std::uint64_t master_seed, std::size_t k);

struct MonteCarloResult {
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<RunRecord> runs;
};

MonteCarloResult monte_carlo(const HyperParams& hyper, std::size_t n_runs, double fraction, std::size_t n_train,
                             std::uint64_t master_seed, const RunFn& run);

struct FilteredEval {
  double raw_accuracy = 0.0;
  double balanced_accuracy = 0.0;  // mean per-class recall over classes present
  std::size_t kept = 0;
  std::size_t total = 0;
  std::vector<double> per_class_recall;  // NaN for classes absent after filtering
};

/// Accuracy of `model` restricted to the samples `teacher` classifies correctly.
FilteredEval filtered_eval(const Model<float>& model, const Dataset& data, const Model<float>& teacher);
FilteredEval filtered_eval_from_predictions(std::span<const int> labels, std::span<const int> teacher_pred,
                                            std::span<const int> model_pred, std::size_t num_classes);

}  // namespace dk
