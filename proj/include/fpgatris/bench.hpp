// Copyright 2026 The fpgatris Authors
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

// Sweep over the request-size limit: for every point and run, generate an
// instance, run each heuristic, re-verify its schedule and record makespan,
// lower bound and wall time.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpgatris/core.hpp"
#include "fpgatris/generator.hpp"
#include "fpgatris/grid.hpp"
#include "fpgatris/heuristics.hpp"

namespace fpgatris {

struct BenchConfig {
  std::vector<double> sweep;
  int runs = 20;
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  // Width, module count, seed and sign mode; rmax_fraction is overwritten
  // by each sweep point.
  GenParams base;
};

struct BenchRecord {
  int point = 0;
  double rmax_fraction = 0;
  Algorithm algorithm = Algorithm::kFirstFit;
  int run = 0;
  std::uint64_t seed = 0;
  int makespan = 0;
  int lower_bound = 0;
  int delays = 0;
  double time_ms = 0;
};

struct BenchAggregate {
  int point = 0;
  double rmax_fraction = 0;
  Algorithm algorithm = Algorithm::kFirstFit;
  int runs = 0;
  double mean_makespan = 0;
  int min_makespan = 0;
  int max_makespan = 0;
  double mean_lower_bound = 0;
  double mean_time_ms = 0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRecord> records;
  // One entry per schedule that failed re-verification.
  std::vector<std::string> defects;

  std::vector<BenchAggregate> aggregate() const {
    std::vector<BenchAggregate> out;
    for (std::size_t p = 0; p < config.sweep.size(); ++p) {
      for (Algorithm a : config.algorithms) {
        BenchAggregate agg;
        agg.point = static_cast<int>(p);
        agg.rmax_fraction = config.sweep[p];
        agg.algorithm = a;
        agg.min_makespan = std::numeric_limits<int>::max();
        agg.max_makespan = 0;
        for (const BenchRecord& r : records) {
          if (r.point != agg.point || r.algorithm != a) continue;
          ++agg.runs;
          agg.mean_makespan += r.makespan;
          agg.min_makespan = std::min(agg.min_makespan, r.makespan);
          agg.max_makespan = std::max(agg.max_makespan, r.makespan);
          agg.mean_lower_bound += r.lower_bound;
          agg.mean_time_ms += r.time_ms;
        }
        if (agg.runs > 0) {
          agg.mean_makespan /= agg.runs;
          agg.mean_lower_bound /= agg.runs;
          agg.mean_time_ms /= agg.runs;
        } else {
          agg.min_makespan = 0;
        }
        out.push_back(agg);
      }
    }
    return out;
  }

  // Mean wall time of `a` over every recorded run.
  double mean_time_ms(Algorithm a) const {
    double sum = 0;
    int n = 0;
    for (const BenchRecord& r : records) {
      if (r.algorithm == a) {
        sum += r.time_ms;
        ++n;
      }
    }
    return n > 0 ? sum / n : 0.0;
  }
};

// Parses "A:B:STEP" into A, A+STEP, ... up to B inclusive.
inline std::vector<double> parse_sweep(std::string_view text) {
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw std::invalid_argument("sweep must look like A:B:STEP");
  }
  const auto num = [](std::string_view s) {
    const std::string str(s);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != str.size()) {
      throw std::invalid_argument("bad sweep number '" + str + "'");
    }
    return v;
  };
  const double a = num(text.substr(0, c1));
  const double b = num(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = num(text.substr(c2 + 1));
  if (!(step > 0) || b < a) throw std::invalid_argument("sweep needs A <= B and STEP > 0");
  const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> points;
  for (long k = 0; k < count; ++k) {
    // Snap to a 1e-9 grid so 0.1 + 2 * 0.1 prints as 0.3.
    points.push_back(std::round((a + static_cast<double>(k) * step) * 1e9) / 1e9);
  }
  return points;
}

inline std::string format_fraction(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

inline BenchReport run_benchmark(const BenchConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  BenchReport report;
  report.config = config;
  using Clock = std::chrono::steady_clock;
  for (std::size_t p = 0; p < config.sweep.size(); ++p) {
    for (int run = 0; run < config.runs; ++run) {
      GenParams params = config.base;
      params.rmax_fraction = config.sweep[p];
      params.seed = derive_seed(config.base.seed, p, static_cast<std::uint64_t>(run));
      const Instance instance = generate_instance(params);
      const int lb = lower_bound(instance);
      for (Algorithm a : config.algorithms) {
        const auto t0 = Clock::now();
        HeuristicResult result = run_heuristic(a, instance);
        const auto t1 = Clock::now();
        const FeasibilityReport check = check_feasible(instance, result.schedule);
        if (!check.ok()) {
          report.defects.push_back(std::string(algorithm_name(a)) + " rmax_frac " +
                                   format_fraction(params.rmax_fraction) + " run " +
                                   std::to_string(run) + " seed " +
                                   std::to_string(params.seed) + ": " + check.message);
          break;
        }
        BenchRecord rec;
        rec.point = static_cast<int>(p);
        rec.rmax_fraction = params.rmax_fraction;
        rec.algorithm = a;
        rec.run = run;
        rec.seed = params.seed;
        rec.makespan = result.makespan;
        rec.lower_bound = lb;
        rec.delays = result.delays;
        rec.time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        report.records.push_back(rec);
      }
    }
  }
  return report;
}

// rmax_frac,algo,run,seed,makespan,lb,delays,time_ms,sign_mode
inline std::string write_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "rmax_frac,algo,run,seed,makespan,lb,delays,time_ms,sign_mode\n";
  for (const BenchRecord& r : report.records) {
    out << format_fraction(r.rmax_fraction) << ',' << algorithm_name(r.algorithm) << ','
        << r.run << ',' << r.seed << ',' << r.makespan << ',' << r.lower_bound << ','
        << r.delays << ',' << std::fixed << std::setprecision(4) << r.time_ms
        << std::defaultfloat << ',' << sign_mode_name(report.config.base.sign_mode)
        << '\n';
  }
  return out.str();
}

inline std::string write_summary(const BenchReport& report) {
  std::ostringstream out;
  out << "# N=" << report.config.base.width << " M=" << report.config.base.modules
      << " runs=" << report.config.runs
      << " sign_mode=" << sign_mode_name(report.config.base.sign_mode) << "\n";
  out << std::left << std::setw(10) << "rmax_frac" << std::setw(9) << "algo"
      << std::right << std::setw(6) << "runs" << std::setw(10) << "mean" << std::setw(6)
      << "min" << std::setw(6) << "max" << std::setw(10) << "mean_lb" << std::setw(14)
      << "mean_time_ms" << "\n";
  out << std::fixed;
  for (const BenchAggregate& a : report.aggregate()) {
    out << std::left << std::setw(10) << format_fraction(a.rmax_fraction) << std::setw(9)
        << algorithm_name(a.algorithm) << std::right << std::setw(6) << a.runs
        << std::setw(10) << std::setprecision(2) << a.mean_makespan << std::setw(6)
        << a.min_makespan << std::setw(6) << a.max_makespan << std::setw(10)
        << a.mean_lower_bound << std::setw(14) << std::setprecision(3)
        << a.mean_time_ms << "\n";
  }
  out << "# mean time over the sweep (ms):";
  for (Algorithm a : report.config.algorithms) {
    out << ' ' << algorithm_name(a) << '=' << std::setprecision(3)
        << report.mean_time_ms(a);
  }
  out << "\n";
  return out.str();
}

// Columns: rmax_frac ff ffd bestfit tabu lb, mean makespans per point.
// Algorithms that were not run are written as nan.
inline std::string write_plot_data(const BenchReport& report) {
  const std::vector<BenchAggregate> aggs = report.aggregate();
  std::ostringstream out;
  out << "# rmax_frac ff ffd bestfit tabu lb\n";
  out << std::fixed << std::setprecision(3);
  for (std::size_t p = 0; p < report.config.sweep.size(); ++p) {
    out << format_fraction(report.config.sweep[p]);
    double lb = std::numeric_limits<double>::quiet_NaN();
    for (Algorithm a : kAllAlgorithms) {
      const auto it = std::find_if(aggs.begin(), aggs.end(), [&](const BenchAggregate& g) {
        return g.point == static_cast<int>(p) && g.algorithm == a && g.runs > 0;
      });
      if (it == aggs.end()) {
        out << " nan";
      } else {
        out << ' ' << it->mean_makespan;
        lb = it->mean_lower_bound;
      }
    }
    if (std::isnan(lb)) {
      out << " nan\n";
    } else {
      out << ' ' << lb << "\n";
    }
  }
  return out.str();
}

}  // namespace fpgatris
