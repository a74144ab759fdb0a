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

// Placement heuristics for the semi-infinite strip: FirstFit, FirstFit with
// delays, BestFit and a tabu search over BestFit insertion orders. All of
// them are deterministic.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fpgatris/core.hpp"
#include "fpgatris/grid.hpp"

namespace fpgatris {

struct HeuristicResult {
  Schedule schedule;
  int makespan = 0;
  int delays = 0;
  std::int64_t evaluations = 0;
  // Insertion order actually used, 0-based module indices.
  std::vector<int> order;
};

enum class PlaceFailure {
  kFirstRequestBlocked,
  kNoHoldableRequest,
  kTimeLimitExceeded,
};

inline const char* failure_name(PlaceFailure f) {
  switch (f) {
    case PlaceFailure::kFirstRequestBlocked: return "first_request_blocked";
    case PlaceFailure::kNoHoldableRequest: return "no_holdable_request";
    case PlaceFailure::kTimeLimitExceeded: return "time_limit_exceeded";
  }
  return "?";
}

using PlaceOutcome = std::variant<Placement, PlaceFailure>;

// Greedy forward construction of a module anchored at `base_slot` with its
// first request at `start_time`. Each following request takes the next row
// if its span is free there. Otherwise the largest already placed request
// whose span is free from its own start through the blocked row is held
// there, every later request is dropped, and construction resumes one row
// higher. `base_slot` must be valid for every request of `module`.
inline PlaceOutcome place_with_delays(const OccupancyGrid& grid,
                                      const ModuleSpec& module, int base_slot,
                                      int start_time,
                                      std::optional<int> time_limit = std::nullopt) {
  const int len = module.length();
  std::vector<Interval> spans(static_cast<std::size_t>(len));
  for (int j = 0; j < len; ++j) {
    spans[static_cast<std::size_t>(j)] = request_span(base_slot, module.size(j));
  }
  const auto over_limit = [&](int row) { return time_limit && row > *time_limit; };

  if (over_limit(start_time)) return PlaceFailure::kTimeLimitExceeded;
  if (!grid.is_free(spans[0], start_time)) return PlaceFailure::kFirstRequestBlocked;

  Placement p{base_slot, {start_time}};
  p.start_times.reserve(static_cast<std::size_t>(len));
  int row = start_time + 1;
  while (static_cast<int>(p.start_times.size()) < len) {
    if (over_limit(row)) return PlaceFailure::kTimeLimitExceeded;
    const std::size_t next = p.start_times.size();
    if (grid.is_free(spans[next], row)) {
      p.start_times.push_back(row);
      ++row;
      continue;
    }
    // The held request must cover every row from its start to `row`.
    int held = -1;
    for (int k = static_cast<int>(next) - 1; k >= 0; --k) {
      const auto ku = static_cast<std::size_t>(k);
      if (grid.is_free(spans[ku], Interval{p.start_times[ku] + 1, row})) {
        held = k;
        break;
      }
    }
    if (held < 0) return PlaceFailure::kNoHoldableRequest;
    p.start_times.resize(static_cast<std::size_t>(held) + 1);
    ++row;
  }
  return p;
}

namespace detail {

// All requests at consecutive rows from `start_time`.
inline bool fits_undelayed(const OccupancyGrid& grid, const ModuleSpec& module,
                           int base_slot, int start_time) {
  for (int j = 0; j < module.length(); ++j) {
    if (!grid.is_free(request_span(base_slot, module.size(j)), start_time + j)) {
      return false;
    }
  }
  return true;
}

inline Placement undelayed(const ModuleSpec& module, int base_slot, int start_time) {
  Placement p{base_slot, {}};
  for (int j = 0; j < module.length(); ++j) p.start_times.push_back(start_time + j);
  return p;
}

inline std::vector<int> identity_order(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

inline HeuristicResult finish(const Instance& instance, Schedule schedule,
                              std::int64_t evaluations, std::vector<int> order) {
  HeuristicResult r;
  r.makespan = makespan(schedule);
  r.delays = delay_count(schedule);
  r.evaluations = evaluations;
  r.schedule = std::move(schedule);
  r.order = order.empty() ? identity_order(instance.module_count()) : std::move(order);
  return r;
}

// Time-major scan shared by both FirstFit variants; `try_place` returns the
// placement for a candidate (t, s) or nullopt.
template <typename TryPlace>
HeuristicResult first_fit_scan(const Instance& instance, TryPlace&& try_place) {
  OccupancyGrid grid(instance.width());
  Schedule schedule;
  std::int64_t evals = 0;
  for (int i = 0; i < instance.module_count(); ++i) {
    const ModuleSpec& m = instance.module(i);
    const Interval bases = m.base_range(instance.width());
    std::optional<Placement> chosen;
    // Row horizon()+1 is empty, so the scan always stops there at the latest.
    for (int t = 1; !chosen; ++t) {
      for (int s = bases.lo; s <= bases.hi && !chosen; ++s) {
        ++evals;
        chosen = try_place(grid, m, s, t);
      }
    }
    grid.claim_placement(m, *chosen, i);
    schedule.placements.push_back(std::move(*chosen));
  }
  return finish(instance, std::move(schedule), evals, {});
}

}  // namespace detail

// Places modules in order at the first (t, s) in time-major order where all
// requests fit at consecutive rows.
inline HeuristicResult first_fit(const Instance& instance) {
  return detail::first_fit_scan(
      instance,
      [](const OccupancyGrid& g, const ModuleSpec& m, int s,
         int t) -> std::optional<Placement> {
        if (!detail::fits_undelayed(g, m, s, t)) return std::nullopt;
        return detail::undelayed(m, s, t);
      });
}

// FirstFit scan where each candidate may delay requests.
inline HeuristicResult first_fit_delays(const Instance& instance) {
  return detail::first_fit_scan(
      instance,
      [](const OccupancyGrid& g, const ModuleSpec& m, int s,
         int t) -> std::optional<Placement> {
        PlaceOutcome out = place_with_delays(g, m, s, t);
        if (auto* p = std::get_if<Placement>(&out)) return std::move(*p);
        return std::nullopt;
      });
}

struct FitScore {
  std::int64_t score = 0;
  int delays = 0;
};

// For each row the candidate occupies, counts cells free of earlier modules
// left and right of the candidate's span in that row. The score is the
// smaller of the two sums.
inline FitScore best_fit_score(const OccupancyGrid& grid, const Placement& candidate,
                               const ModuleSpec& module) {
  std::int64_t left = 0;
  std::int64_t right = 0;
  const int width = grid.width();
  for (int j = 0; j < module.length(); ++j) {
    const Interval span = request_span(candidate.base_slot, module.size(j));
    const Interval rows = candidate.active_rows(j);
    for (int t = rows.lo; t <= rows.hi; ++t) {
      left += grid.free_count(Interval{1, span.lo - 1}, t);
      right += grid.free_count(Interval{span.hi + 1, width}, t);
    }
  }
  return {std::min(left, right), candidate.delays()};
}

// BestFit with the module insertion order given by `order` (0-based). The
// returned schedule is indexed by original module, not by insertion rank.
inline HeuristicResult best_fit(const Instance& instance, std::span<const int> order) {
  const int width = instance.width();
  OccupancyGrid grid(width);
  std::vector<Placement> placed(static_cast<std::size_t>(instance.module_count()));
  std::int64_t evals = 0;
  int t_max = 0;
  for (int i : order) {
    const ModuleSpec& m = instance.module(i);
    const Interval bases = m.base_range(width);
    t_max += (m.length() + 1) / 2;
    std::optional<Placement> best;
    FitScore best_score;
    // Stops at the first (0, 0) candidate: nothing scores lower and ties
    // keep the earlier candidate.
    const auto scan = [&] {
      for (int t = 1; t <= t_max; ++t) {
        for (int s = bases.lo; s <= bases.hi; ++s) {
          ++evals;
          PlaceOutcome out = place_with_delays(grid, m, s, t, t_max);
          auto* p = std::get_if<Placement>(&out);
          if (p == nullptr) continue;
          const FitScore sc = best_fit_score(grid, *p, m);
          if (!best || sc.score < best_score.score ||
              (sc.score == best_score.score && sc.delays < best_score.delays)) {
            best = std::move(*p);
            best_score = sc;
            if (sc.score == 0 && sc.delays == 0) return;
          }
        }
      }
    };
    for (scan(); !best; scan()) t_max += m.length();
    grid.claim_placement(m, *best, i);
    placed[static_cast<std::size_t>(i)] = std::move(*best);
  }
  return detail::finish(instance, Schedule{std::move(placed)}, evals,
                        std::vector<int>(order.begin(), order.end()));
}

inline HeuristicResult best_fit(const Instance& instance) {
  const std::vector<int> order = detail::identity_order(instance.module_count());
  return best_fit(instance, order);
}

// Tabu search over BestFit insertion orders. For swapping distance
// d = 0..floor(M/2), tries swapping positions j and ((j + d) mod M) + 1 for
// every j whose unordered position pair is not tabu, and commits the swap
// that gives the best makespan so far (strictly better than the incumbent).
inline HeuristicResult tabu_search(const Instance& instance) {
  const int m = instance.module_count();
  std::vector<int> order = detail::identity_order(m);
  HeuristicResult best = best_fit(instance, order);
  std::int64_t evals = best.evaluations;
  std::set<std::pair<int, int>> tabu;

  for (int d = 0; d <= m / 2; ++d) {
    int found = 0;
    HeuristicResult round_best;
    int round_makespan = best.makespan;
    for (int j = 1; j <= m; ++j) {
      const int partner = ((j + d) % m) + 1;
      if (partner == j) continue;
      const std::pair<int, int> key{std::min(j, partner), std::max(j, partner)};
      if (tabu.contains(key)) continue;
      std::swap(order[static_cast<std::size_t>(j - 1)],
                order[static_cast<std::size_t>(partner - 1)]);
      HeuristicResult trial = best_fit(instance, order);
      evals += trial.evaluations;
      if (trial.makespan < round_makespan) {
        round_makespan = trial.makespan;
        round_best = std::move(trial);
        found = j;
      }
      std::swap(order[static_cast<std::size_t>(j - 1)],
                order[static_cast<std::size_t>(partner - 1)]);
    }
    if (found > 0) {
      const int partner = ((found + d) % m) + 1;
      std::swap(order[static_cast<std::size_t>(found - 1)],
                order[static_cast<std::size_t>(partner - 1)]);
      tabu.emplace(std::min(found, partner), std::max(found, partner));
      best = std::move(round_best);
    }
  }
  best.evaluations = evals;
  return best;
}

enum class Algorithm { kFirstFit, kFirstFitDelays, kBestFit, kTabu };

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::kFirstFit, Algorithm::kFirstFitDelays, Algorithm::kBestFit,
    Algorithm::kTabu};

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kFirstFit: return "ff";
    case Algorithm::kFirstFitDelays: return "ffd";
    case Algorithm::kBestFit: return "bestfit";
    case Algorithm::kTabu: return "tabu";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (name == algorithm_name(a)) return a;
  }
  return std::nullopt;
}

inline HeuristicResult run_heuristic(Algorithm a, const Instance& instance) {
  switch (a) {
    case Algorithm::kFirstFit: return first_fit(instance);
    case Algorithm::kFirstFitDelays: return first_fit_delays(instance);
    case Algorithm::kBestFit: return best_fit(instance);
    case Algorithm::kTabu: return tabu_search(instance);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace fpgatris
