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

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpgatris/core.hpp"

namespace fpgatris {

// Request (module, request) owning a cell. Indices are 0-based.
struct Owner {
  int module = -1;
  int request = -1;

  constexpr bool free() const { return module < 0; }
  friend constexpr bool operator==(const Owner&, const Owner&) = default;
};

class OverlapError : public std::runtime_error {
 public:
  OverlapError(int slot, int time, Owner a, Owner b)
      : std::runtime_error("cell (slot " + std::to_string(slot) + ", time " +
                           std::to_string(time) + ") claimed by request (" +
                           std::to_string(a.module + 1) + "," +
                           std::to_string(a.request + 1) + ") and (" +
                           std::to_string(b.module + 1) + "," +
                           std::to_string(b.request + 1) + ")"),
        slot_(slot),
        time_(time),
        first_(a),
        second_(b) {}

  int slot() const { return slot_; }
  int time() const { return time_; }
  Owner first() const { return first_; }
  Owner second() const { return second_; }

 private:
  int slot_;
  int time_;
  Owner first_;
  Owner second_;
};

// Slot x time matrix of cell owners. Rows grow on demand; any row past
// horizon() is entirely free. Each row also keeps an occupancy bitmask so the
// placement heuristics can test a span with a few word operations.
class OccupancyGrid {
 public:
  explicit OccupancyGrid(int width, int horizon = 0)
      : width_(width), words_((width + 63) / 64) {
    if (width < 1) throw std::invalid_argument("grid width must be >= 1");
    reserve_rows(horizon);
  }

  int width() const { return width_; }
  int horizon() const { return horizon_; }

  Owner owner(int slot, int time) const {
    if (time < 1 || time > horizon_) return Owner{};
    return owners_[cell_index(slot, time)];
  }

  bool occupied(int slot, int time) const { return !owner(slot, time).free(); }

  // True iff every slot of `slots` is free at row `time`. Slots must lie
  // inside [1, width].
  bool is_free(Interval slots, int time) const {
    if (time < 1 || time > horizon_ || slots.empty()) return true;
    const std::uint64_t* row = row_bits(time);
    bool hit = false;
    for_each_word(slots, [&](int w, std::uint64_t mask) {
      hit = hit || (row[w] & mask) != 0;
    });
    return !hit;
  }

  bool is_free(Interval slots, Interval rows) const {
    for (int t = rows.lo; t <= rows.hi; ++t) {
      if (!is_free(slots, t)) return false;
    }
    return true;
  }

  // Number of free cells among `slots` at row `time`.
  int free_count(Interval slots, int time) const {
    if (slots.empty()) return 0;
    if (time < 1 || time > horizon_) return slots.length();
    const std::uint64_t* row = row_bits(time);
    int used = 0;
    for_each_word(slots, [&](int w, std::uint64_t mask) {
      used += std::popcount(row[w] & mask);
    });
    return slots.length() - used;
  }

  int occupied_count(int time) const {
    if (time < 1 || time > horizon_) return 0;
    const std::uint64_t* row = row_bits(time);
    int used = 0;
    for (int w = 0; w < words_; ++w) used += std::popcount(row[w]);
    return used;
  }

  // Marks `slots` x `rows` as owned by `who`. Throws OverlapError on the first
  // cell already owned; cells claimed before the conflict stay claimed.
  void claim(Interval slots, Interval rows, Owner who) {
    if (slots.empty() || rows.empty()) return;
    if (slots.lo < 1 || slots.hi > width_ || rows.lo < 1) {
      throw std::out_of_range("claim outside the strip");
    }
    reserve_rows(rows.hi);
    for (int t = rows.lo; t <= rows.hi; ++t) {
      for (int s = slots.lo; s <= slots.hi; ++s) {
        Owner& cell = owners_[cell_index(s, t)];
        if (!cell.free()) throw OverlapError(s, t, cell, who);
        cell = who;
        row_bits(t)[(s - 1) / 64] |= std::uint64_t{1} << ((s - 1) % 64);
      }
    }
  }

  void release(Interval slots, Interval rows) {
    for (int t = rows.lo; t <= std::min(rows.hi, horizon_); ++t) {
      for (int s = slots.lo; s <= slots.hi; ++s) {
        owners_[cell_index(s, t)] = Owner{};
        row_bits(t)[(s - 1) / 64] &= ~(std::uint64_t{1} << ((s - 1) % 64));
      }
    }
  }

  // Claims every cell of `placement` for module `module_index`.
  void claim_placement(const ModuleSpec& module, const Placement& placement,
                       int module_index) {
    for (int j = 0; j < module.length(); ++j) {
      claim(request_span(placement.base_slot, module.size(j)),
            placement.active_rows(j), Owner{module_index, j});
    }
  }

  void release_placement(const ModuleSpec& module, const Placement& placement) {
    for (int j = 0; j < module.length(); ++j) {
      release(request_span(placement.base_slot, module.size(j)),
              placement.active_rows(j));
    }
  }

  std::int64_t owned_cells() const {
    std::int64_t n = 0;
    for (const Owner& o : owners_) n += o.free() ? 0 : 1;
    return n;
  }

  // Highest row holding any owned cell, 0 if none.
  int highest_occupied_row() const {
    for (int t = horizon_; t >= 1; --t) {
      if (occupied_count(t) > 0) return t;
    }
    return 0;
  }

 private:
  void reserve_rows(int rows) {
    if (rows <= horizon_) return;
    horizon_ = rows;
    owners_.resize(static_cast<std::size_t>(horizon_) * width_);
    bits_.resize(static_cast<std::size_t>(horizon_) * words_, 0);
  }

  std::size_t cell_index(int slot, int time) const {
    return static_cast<std::size_t>(time - 1) * width_ + (slot - 1);
  }

  const std::uint64_t* row_bits(int time) const {
    return bits_.data() + static_cast<std::size_t>(time - 1) * words_;
  }
  std::uint64_t* row_bits(int time) {
    return bits_.data() + static_cast<std::size_t>(time - 1) * words_;
  }

  // Calls f(word, mask) for every word touched by the 1-based slot interval.
  template <typename F>
  static void for_each_word(Interval slots, F&& f) {
    const int first = slots.lo - 1;
    const int last = slots.hi - 1;
    for (int w = first / 64; w <= last / 64; ++w) {
      const int lo = std::max(first, w * 64) - w * 64;
      const int hi = std::min(last, w * 64 + 63) - w * 64;
      const std::uint64_t upper =
          hi == 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (hi + 1)) - 1;
      const std::uint64_t lower = (std::uint64_t{1} << lo) - 1;
      f(w, upper & ~lower);
    }
  }

  int width_;
  int words_;
  int horizon_ = 0;
  std::vector<Owner> owners_;
  std::vector<std::uint64_t> bits_;
};

// Grid of every cell owned by `schedule`; horizon equals its makespan.
// Throws OverlapError if two requests claim one cell.
inline OccupancyGrid build_grid(const Instance& instance,
                                const Schedule& schedule) {
  OccupancyGrid grid(instance.width(), makespan(schedule));
  for (int i = 0; i < instance.module_count(); ++i) {
    grid.claim_placement(instance.module(i),
                         schedule.placements[static_cast<std::size_t>(i)], i);
  }
  return grid;
}

enum class Rule { kNone, kShape, kBoundary, kOrder, kOverlap };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::kNone: return "ok";
    case Rule::kShape: return "shape";
    case Rule::kBoundary: return "boundary";
    case Rule::kOrder: return "order";
    case Rule::kOverlap: return "overlap";
  }
  return "?";
}

// Outcome of check_feasible. Indices are 0-based; -1 when not applicable.
struct FeasibilityReport {
  Rule rule = Rule::kNone;
  int module = -1;
  int request = -1;
  int slot = 0;
  int time = 0;
  Owner other;
  std::string message;

  bool ok() const { return rule == Rule::kNone; }
  explicit operator bool() const { return ok(); }
};

// Checks shape (one placement per module, one start per request), then
// boundary and order for each module in turn, then cell exclusivity.
inline FeasibilityReport check_feasible(const Instance& instance,
                                        const Schedule& schedule) {
  FeasibilityReport report;
  const auto fail = [&](Rule rule, int i, int j, std::string msg) {
    report.rule = rule;
    report.module = i;
    report.request = j;
    report.message = std::move(msg);
    return report;
  };

  if (static_cast<int>(schedule.placements.size()) != instance.module_count()) {
    return fail(Rule::kShape, -1, -1,
                "schedule has " + std::to_string(schedule.placements.size()) +
                    " placements for " +
                    std::to_string(instance.module_count()) + " modules");
  }
  for (int i = 0; i < instance.module_count(); ++i) {
    const ModuleSpec& m = instance.module(i);
    const Placement& p = schedule.placements[static_cast<std::size_t>(i)];
    const std::string tag = "module " + std::to_string(i + 1);
    if (static_cast<int>(p.start_times.size()) != m.length()) {
      return fail(Rule::kShape, i, -1, tag + " start count differs from its length");
    }
    for (int j = 0; j < m.length(); ++j) {
      const Interval span = request_span(p.base_slot, m.size(j));
      if (span.lo < 1 || span.hi > instance.width()) {
        report.slot = p.base_slot;
        return fail(Rule::kBoundary, i, j,
                    tag + " request " + std::to_string(j + 1) +
                        " leaves the strip from base " +
                        std::to_string(p.base_slot));
      }
    }
    if (p.start_times.front() < 1) {
      report.time = p.start_times.front();
      return fail(Rule::kOrder, i, 0, tag + " starts before row 1");
    }
    for (int j = 1; j < m.length(); ++j) {
      const auto idx = static_cast<std::size_t>(j);
      if (p.start_times[idx] <= p.start_times[idx - 1]) {
        report.time = p.start_times[idx];
        return fail(Rule::kOrder, i, j,
                    tag + " request " + std::to_string(j + 1) +
                        " does not start after request " + std::to_string(j));
      }
    }
  }
  try {
    build_grid(instance, schedule);
  } catch (const OverlapError& e) {
    report.slot = e.slot();
    report.time = e.time();
    report.other = e.first();
    return fail(Rule::kOverlap, e.second().module, e.second().request, e.what());
  }
  return report;
}

}  // namespace fpgatris
