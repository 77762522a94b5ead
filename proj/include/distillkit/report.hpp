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

// Report emission. All files are UTF-8 with LF endings and fixed column
// order; identical inputs give byte-identical files.
//
//   runs.csv     config_id,seed,subsample_fraction,final_test_accuracy,wall_time_s
//   summary.csv  method,delta_acc,max,min,mean,std,t_stat,p_value
//   curves.tsv   compression_factor  method  mean_acc  speedup

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "distillkit/harness.hpp"
#include "distillkit/stats.hpp"

namespace dk {

/// One row of the method comparison table. Accuracies are in percent.
struct SummaryRow {
  std::string method;
  std::optional<double> delta_acc;  // max accuracy minus teacher accuracy
  double max = 0.0, min = 0.0, mean = 0.0, std = 0.0;
  std::optional<double> t_stat, p_value;  // paired test against the baseline row
  std::optional<LillieforsResult> normality;
};

/// Builds rows from per-method accuracy lists (fractions in [0, 1]) paired by
/// run index. `baseline` names the method the others are tested against.
std::vector<SummaryRow> summarize_methods(const std::vector<std::pair<std::string, std::vector<double>>>& methods,
                                          const std::string& baseline, std::optional<double> teacher_accuracy,
                                          const LillieforsOptions& lopt = {});

struct CurvePoint {
  double compression_factor = 1.0;
  std::string method;
  double mean_acc = 0.0;
  double speedup = 1.0;
};

std::string runs_csv(const std::vector<RunRecord>& records);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string curves_tsv(const std::vector<CurvePoint>& points);
/// Method,Mean,Std Dev,t-statistic,p-value
std::string monte_carlo_csv(const std::vector<SummaryRow>& rows);
/// method,ksstat,p_value,variance (rows without a normality result are skipped)
std::string normality_csv(const std::vector<SummaryRow>& rows);
/// Per-epoch curves: config_id,seed,epoch,train_loss,test_accuracy
std::string epochs_csv(const std::vector<RunRecord>& records);

/// Markdown matrix of mean accuracy, rows alpha, columns T, maximum in bold.
/// Cells sharing (alpha, T) are reduced to their best mean.
std::string kd_matrix_markdown(const GridResult& grid);
/// One row per cell: alpha,temperature,overlay_p,gamma,n,mean,std
std::string grid_csv(const GridResult& grid);

/// Writes runs.csv, summary.csv and curves.tsv into `out_dir` (created if
/// missing). Throws DataError when the directory is not writable.
void write_report(const std::vector<RunRecord>& records, const std::vector<SummaryRow>& summaries,
                  const std::vector<CurvePoint>& curves, const std::filesystem::path& out_dir);

}  // namespace dk
