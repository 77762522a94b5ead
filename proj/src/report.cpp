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

#include "distillkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "distillkit/binio.hpp"
#include "distillkit/errors.hpp"

namespace dk {

namespace {

std::string fixed(double v, int prec) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string opt(const std::optional<double>& v, int prec) { return v ? fixed(*v, prec) : "-"; }

std::vector<double> percent(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return 100.0 * x; });
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize_methods(const std::vector<std::pair<std::string, std::vector<double>>>& methods,
                                          const std::string& baseline, std::optional<double> teacher_accuracy,
                                          const LillieforsOptions& lopt) {
  const std::vector<double>* base = nullptr;
  for (const auto& [name, accs] : methods) {
    if (name == baseline) base = &accs;
  }
  std::vector<SummaryRow> rows;
  for (const auto& [name, accs] : methods) {
    if (accs.empty()) throw ShapeError("summarize_methods: method '" + name + "' has no runs");
    const std::vector<double> pct = percent(accs);
    const bool tested = base && name != baseline && base->size() == accs.size() && accs.size() >= 2;
    const std::vector<double> base_pct = tested ? percent(*base) : std::vector<double>{};
    const StatsSummary s = summarize(pct, base_pct, lopt);
    SummaryRow r;
    r.method = name;
    r.max = s.max;
    r.min = s.min;
    r.mean = s.mean;
    r.std = s.std;
    if (teacher_accuracy) r.delta_acc = s.max - 100.0 * *teacher_accuracy;
    if (s.vs_baseline) {
      r.t_stat = s.vs_baseline->t;
      r.p_value = s.vs_baseline->p;
    }
    r.normality = s.normality;
    rows.push_back(r);
  }
  return rows;
}

std::string runs_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "config_id,seed,subsample_fraction,final_test_accuracy,wall_time_s\n";
  for (const auto& r : records) {
    os << r.config_id << ',' << r.seed << ',' << fixed(r.subsample_fraction, 4) << ','
       << fixed(r.final_test_accuracy, 6) << ',' << fixed(r.wall_time_s, 3) << '\n';
  }
  return os.str();
}

std::string epochs_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "config_id,seed,epoch,train_loss,test_accuracy\n";
  for (const auto& r : records) {
    for (std::size_t e = 0; e < r.epoch_curve.size(); ++e) {
      os << r.config_id << ',' << r.seed << ',' << e + 1 << ',' << fixed(r.epoch_curve[e].train_loss, 6) << ','
         << fixed(r.epoch_curve[e].test_accuracy, 6) << '\n';
    }
  }
  return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "method,delta_acc,max,min,mean,std,t_stat,p_value\n";
  for (const auto& r : rows) {
    os << r.method << ',' << opt(r.delta_acc, 2) << ',' << fixed(r.max, 2) << ',' << fixed(r.min, 2) << ','
       << fixed(r.mean, 2) << ',' << fixed(r.std, 2) << ',' << opt(r.t_stat, 2) << ',' << opt(r.p_value, 6) << '\n';
  }
  return os.str();
}

std::string monte_carlo_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "Method,Mean,Std Dev,t-statistic,p-value\n";
  for (const auto& r : rows) {
    os << r.method << ',' << fixed(r.mean, 2) << ',' << fixed(r.std, 2) << ',' << opt(r.t_stat, 2) << ','
       << opt(r.p_value, 6) << '\n';
  }
  return os.str();
}

std::string normality_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "method,ksstat,p_value,variance\n";
  for (const auto& r : rows) {
    if (!r.normality) continue;
    os << r.method << ',' << fixed(r.normality->ksstat, 4) << ',' << fixed(r.normality->p_value, 4) << ','
       << fixed(r.normality->variance, 4) << '\n';
  }
  return os.str();
}

std::string curves_tsv(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  os << "compression_factor\tmethod\tmean_acc\tspeedup\n";
  for (const auto& p : points) {
    os << fixed(p.compression_factor, 4) << '\t' << p.method << '\t' << fixed(p.mean_acc, 4) << '\t'
       << fixed(p.speedup, 4) << '\n';
  }
  return os.str();
}

std::string kd_matrix_markdown(const GridResult& grid) {
  std::map<double, std::map<double, double>> m;  // alpha -> T -> best mean
  std::vector<double> temps;
  for (const auto& c : grid.cells) {
    auto [it, inserted] = m[c.hyper.alpha].try_emplace(c.hyper.temperature, c.summary.mean);
    if (!inserted) it->second = std::max(it->second, c.summary.mean);
    if (std::find(temps.begin(), temps.end(), c.hyper.temperature) == temps.end()) temps.push_back(c.hyper.temperature);
  }
  std::sort(temps.begin(), temps.end());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [a, row] : m) {
    for (const auto& [t, v] : row) best = std::max(best, v);
  }
  std::ostringstream os;
  os << "| alpha \\ T |";
  for (double t : temps) os << ' ' << fixed(t, 1) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < temps.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& [a, row] : m) {
    std::ostringstream alpha;
    alpha << a;
    os << "| " << alpha.str() << " |";
    for (double t : temps) {
      const auto it = row.find(t);
      if (it == row.end()) {
        os << " - |";
        continue;
      }
      const std::string v = fixed(100.0 * it->second, 2);
      os << ' ' << (it->second == best ? "**" + v + "**" : v) << " |";
    }
    os << '\n';
  }
  return os.str();
}

std::string grid_csv(const GridResult& grid) {
  std::ostringstream os;
  os << "alpha,temperature,overlay_p,gamma,n,mean,std\n";
  for (const auto& c : grid.cells) {
    std::ostringstream row;
    row << c.hyper.alpha << ',' << c.hyper.temperature << ',' << c.hyper.overlay_p << ',' << c.hyper.gamma;
    os << row.str() << ',' << c.summary.n << ',' << fixed(c.summary.mean, 6) << ',' << fixed(c.summary.std, 6)
       << '\n';
  }
  return os.str();
}

void write_report(const std::vector<RunRecord>& records, const std::vector<SummaryRow>& summaries,
                  const std::vector<CurvePoint>& curves, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create report directory " + out_dir.string() + ": " + ec.message());
  io::write_text(out_dir / "runs.csv", runs_csv(records));
  io::write_text(out_dir / "summary.csv", summary_csv(summaries));
  io::write_text(out_dir / "curves.tsv", curves_tsv(curves));
}

}  // namespace dk
