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

// Problem data model: a strip of `width` slots, modules whose resource
// requests change over discrete time, and schedules that anchor every module
// at a base slot with strictly increasing request start times.
//
// Slots and time rows are 1-based everywhere. Module and request indices are
// 0-based in containers and 1-based in every textual output.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fpgatris {

// Inclusive integer interval [lo, hi]; empty when lo > hi.
struct Interval {
  int lo = 1;
  int hi = 0;

  constexpr bool empty() const { return lo > hi; }
  constexpr int length() const { return empty() ? 0 : hi - lo + 1; }
  constexpr bool contains(int v) const { return lo <= v && v <= hi; }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

// A signed slot count. Positive sizes grow to the right of the base slot,
// negative ones to the left. Zero is not a request.
class Request {
 public:
  explicit Request(int size) : size_(size) {
    if (size == 0) throw std::invalid_argument("request size must be nonzero");
  }

  int size() const { return size_; }
  int magnitude() const { return std::abs(size_); }

  friend bool operator==(const Request&, const Request&) = default;

 private:
  int size_;
};

// Slots covered by a request of `size` anchored at `base_slot`.
constexpr Interval request_span(int base_slot, int size) {
  return size > 0 ? Interval{base_slot, base_slot + size - 1}
                  : Interval{base_slot + size + 1, base_slot};
}

struct ModuleSpec {
  std::vector<Request> requests;

  ModuleSpec() = default;
  explicit ModuleSpec(std::vector<Request> r) : requests(std::move(r)) {}
  ModuleSpec(std::initializer_list<int> sizes) {
    requests.reserve(sizes.size());
    for (int s : sizes) requests.emplace_back(s);
  }

  int length() const { return static_cast<int>(requests.size()); }
  int size(int j) const { return requests[static_cast<std::size_t>(j)].size(); }

  std::int64_t area() const {
    std::int64_t a = 0;
    for (const Request& r : requests) a += r.magnitude();
    return a;
  }

  int max_magnitude() const {
    int m = 0;
    for (const Request& r : requests) m = std::max(m, r.magnitude());
    return m;
  }

  // Base slots for which every request stays inside [1, width]. A base s is
  // valid for r > 0 iff s <= width - r + 1 and for r < 0 iff s >= -r.
  Interval base_range(int width) const {
    Interval range{1, width};
    for (const Request& r : requests) {
      if (r.size() > 0) {
        range.hi = std::min(range.hi, width - r.size() + 1);
      } else {
        range.lo = std::max(range.lo, -r.size());
      }
    }
    return range;
  }

  friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

// Strip width plus an ordered module list. Construction validates that every
// module is placeable on its own.
class Instance {
 public:
  Instance() = default;

  Instance(int width, std::vector<ModuleSpec> modules)
      : width_(width), modules_(std::move(modules)) {
    if (width_ < 1) throw std::invalid_argument("width must be >= 1");
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      const ModuleSpec& m = modules_[i];
      const std::string tag = "module " + std::to_string(i + 1);
      if (m.requests.empty()) {
        throw std::invalid_argument(tag + " has no requests");
      }
      if (m.max_magnitude() > width_) {
        throw std::invalid_argument(tag + " has a request wider than the strip");
      }
      if (m.base_range(width_).empty()) {
        throw std::invalid_argument(tag + " has no base slot within bounds");
      }
    }
  }

  int width() const { return width_; }
  int module_count() const { return static_cast<int>(modules_.size()); }
  const std::vector<ModuleSpec>& modules() const { return modules_; }
  const ModuleSpec& module(int i) const {
    return modules_[static_cast<std::size_t>(i)];
  }

  int total_requests() const {
    int n = 0;
    for (const ModuleSpec& m : modules_) n += m.length();
    return n;
  }

  std::int64_t total_area() const {
    std::int64_t a = 0;
    for (const ModuleSpec& m : modules_) a += m.area();
    return a;
  }

  int max_length() const {
    int l = 0;
    for (const ModuleSpec& m : modules_) l = std::max(l, m.length());
    return l;
  }

  // Same strip, modules taken in `order` (0-based indices into this instance).
  Instance permuted(std::span<const int> order) const {
    std::vector<ModuleSpec> mods;
    mods.reserve(order.size());
    for (int idx : order) mods.push_back(module(idx));
    return Instance(width_, std::move(mods));
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  int width_ = 1;
  std::vector<ModuleSpec> modules_;
};

struct Placement {
  int base_slot = 1;
  std::vector<int> start_times;

  // Rows during which request j occupies its span. A request persists until
  // the next one starts; the final request occupies a single row.
  Interval active_rows(int j) const {
    const auto idx = static_cast<std::size_t>(j);
    if (idx + 1 < start_times.size()) {
      return {start_times[idx], start_times[idx + 1] - 1};
    }
    return {start_times[idx], start_times[idx]};
  }

  int last_start() const { return start_times.empty() ? 0 : start_times.back(); }

  int delays() const {
    int d = 0;
    for (std::size_t j = 1; j < start_times.size(); ++j) {
      d += start_times[j] - start_times[j - 1] - 1;
    }
    return d;
  }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Schedule {
  std::vector<Placement> placements;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline Interval active_rows(const Placement& placement, int j) {
  return placement.active_rows(j);
}

// Last used time row; 0 for an empty schedule.
inline int makespan(const Schedule& schedule) {
  int m = 0;
  for (const Placement& p : schedule.placements) m = std::max(m, p.last_start());
  return m;
}

inline int delay_count(const Schedule& schedule) {
  int d = 0;
  for (const Placement& p : schedule.placements) d += p.delays();
  return d;
}

// ceil(total requested area / width).
inline int lower_bound(const Instance& instance) {
  const std::int64_t area = instance.total_area();
  const std::int64_t w = instance.width();
  return static_cast<int>((area + w - 1) / w);
}

}  // namespace fpgatris
