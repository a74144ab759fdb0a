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

// Exhaustive branch-and-bound for tiny instances. Ground truth for the
// heuristics and the 0-1 model.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpgatris/core.hpp"
#include "fpgatris/grid.hpp"
#include "fpgatris/heuristics.hpp"

namespace fpgatris {

struct OracleLimits {
  int max_width = 8;
  int max_modules = 4;
  int max_total_requests = 10;
  // Largest heuristic upper bound the search accepts as its horizon.
  int horizon_cap = 64;
  std::uint64_t node_budget = 100'000'000;
};

class LimitsExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  OracleLimits limits;
  // When false, every module runs its requests at consecutive rows.
  bool allow_delays = true;
  // Order placements of identical modules to skip equivalent permutations.
  bool break_symmetry = true;
};

struct ExactResult {
  enum class Status { kOptimal, kBudgetExceeded };

  Status status = Status::kOptimal;
  int makespan = 0;
  Schedule witness;
  std::uint64_t nodes = 0;

  bool optimal() const { return status == Status::kOptimal; }
};

inline void check_limits(const Instance& instance, const OracleLimits& limits) {
  const auto fail = [](const std::string& what, int value, int limit) {
    throw LimitsExceeded(what + " " + std::to_string(value) + " exceeds limit " +
                         std::to_string(limit));
  };
  if (instance.width() > limits.max_width) {
    fail("width", instance.width(), limits.max_width);
  }
  if (instance.module_count() > limits.max_modules) {
    fail("module count", instance.module_count(), limits.max_modules);
  }
  if (instance.total_requests() > limits.max_total_requests) {
    fail("total requests", instance.total_requests(), limits.max_total_requests);
  }
}

namespace detail {

class ExactSearch {
 public:
  ExactSearch(const Instance& instance, const OracleOptions& options,
              const HeuristicResult& seed)
      : inst_(instance),
        opts_(options),
        grid_(instance.width(), seed.makespan),
        current_(instance.module_count()),
        best_(seed.schedule),
        incumbent_(seed.makespan),
        lb_(lower_bound(instance)) {
    const int m = instance.module_count();
    twin_.assign(static_cast<std::size_t>(m), -1);
    remaining_area_.assign(static_cast<std::size_t>(m) + 1, 0);
    for (int i = m - 1; i >= 0; --i) {
      remaining_area_[static_cast<std::size_t>(i)] =
          remaining_area_[static_cast<std::size_t>(i) + 1] + instance.module(i).area();
    }
    if (opts_.break_symmetry) {
      for (int i = 0; i < m; ++i) {
        for (int k = i - 1; k >= 0; --k) {
          if (instance.module(k) == instance.module(i)) {
            twin_[static_cast<std::size_t>(i)] = k;
            break;
          }
        }
      }
    }
  }

  ExactResult run() {
    if (incumbent_ > lb_) place_module(0, 0);
    ExactResult r;
    r.status = exhausted_ ? ExactResult::Status::kBudgetExceeded
                          : ExactResult::Status::kOptimal;
    r.makespan = incumbent_;
    r.witness = best_;
    r.nodes = nodes_;
    return r;
  }

 private:
  // Any improvement needs every start row strictly below the incumbent.
  int limit_row() const { return incumbent_ - 1; }

  bool spend_node() {
    if (nodes_ >= opts_.limits.node_budget) {
      exhausted_ = true;
      return false;
    }
    ++nodes_;
    return true;
  }

  bool done() const { return exhausted_ || incumbent_ <= lb_; }

  bool area_fits(int module) const {
    const int rows = limit_row();
    std::int64_t used = 0;
    for (int t = 1; t <= rows; ++t) used += grid_.occupied_count(t);
    const std::int64_t free_cells =
        static_cast<std::int64_t>(rows) * inst_.width() - used;
    return remaining_area_[static_cast<std::size_t>(module)] <= free_cells;
  }

  void place_module(int i, int partial) {
    if (done()) return;
    if (i == inst_.module_count()) {
      incumbent_ = partial;
      best_.placements = current_;
      return;
    }
    if (!area_fits(i)) return;
    const ModuleSpec& m = inst_.module(i);
    const Interval bases = m.base_range(inst_.width());
    const int twin = twin_[static_cast<std::size_t>(i)];
    for (int t = 1; t <= limit_row() && !done(); ++t) {
      for (int s = bases.lo; s <= bases.hi && !done(); ++s) {
        if (twin >= 0) {
          const Placement& prev = current_[static_cast<std::size_t>(twin)];
          const int t0 = prev.start_times.front();
          if (t < t0 || (t == t0 && s <= prev.base_slot)) continue;
        }
        if (!spend_node()) return;
        const Interval span = request_span(s, m.size(0));
        if (!grid_.is_free(span, t)) continue;
        Placement& p = current_[static_cast<std::size_t>(i)];
        p.base_slot = s;
        p.start_times.assign(1, t);
        place_request(i, 1, partial);
      }
    }
  }

  // Requests 0..j-1 of module i have start rows; request j-1 is not yet
  // claimed because its duration depends on where request j starts.
  void place_request(int i, int j, int partial) {
    const ModuleSpec& m = inst_.module(i);
    Placement& p = current_[static_cast<std::size_t>(i)];
    const int prev_start = p.start_times.back();
    const Interval prev_span = request_span(p.base_slot, m.size(j - 1));
    const Owner prev_owner{i, j - 1};
    if (j == m.length()) {
      grid_.claim(prev_span, Interval{prev_start, prev_start}, prev_owner);
      place_module(i + 1, std::max(partial, prev_start));
      grid_.release(prev_span, Interval{prev_start, prev_start});
      return;
    }
    const Interval span = request_span(p.base_slot, m.size(j));
    const int last = opts_.allow_delays ? limit_row() : prev_start + 1;
    for (int t = prev_start + 1; t <= std::min(last, limit_row()) && !done(); ++t) {
      // Request j-1 must also hold row t-1 when t > prev_start + 1.
      if (t > prev_start + 1 && !grid_.is_free(prev_span, t - 1)) break;
      if (!spend_node()) return;
      if (!grid_.is_free(span, t)) continue;
      const Interval held{prev_start, t - 1};
      grid_.claim(prev_span, held, prev_owner);
      p.start_times.push_back(t);
      place_request(i, j + 1, partial);
      p.start_times.pop_back();
      grid_.release(prev_span, held);
    }
  }

  const Instance& inst_;
  const OracleOptions& opts_;
  OccupancyGrid grid_;
  std::vector<Placement> current_;
  Schedule best_;
  int incumbent_;
  int lb_;
  std::vector<int> twin_;
  std::vector<std::int64_t> remaining_area_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace detail

// Provably optimal makespan and a witness schedule, or the best incumbent
// flagged kBudgetExceeded once the node budget runs out. The search horizon
// is the makespan of FirstFit with delays (FirstFit when delays are
// disallowed). Throws LimitsExceeded for instances outside `options.limits`.
inline ExactResult solve_exact(const Instance& instance, const OracleOptions& options = {}) {
  check_limits(instance, options.limits);
  HeuristicResult seed =
      options.allow_delays ? first_fit_delays(instance) : first_fit(instance);
  if (seed.makespan > options.limits.horizon_cap) {
    throw LimitsExceeded("horizon " + std::to_string(seed.makespan) +
                         " exceeds limit " + std::to_string(options.limits.horizon_cap));
  }
  return detail::ExactSearch(instance, options, seed).run();
}

}  // namespace fpgatris
