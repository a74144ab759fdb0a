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

// Exact 0-1 formulation of the makespan problem over a horizon of T rows.
//
// Variables (all binary, names use 1-based indices):
//   x_s_i      module i anchored at slot s
//   y_t_i_j    request (i,j) starts at row t
//   z_s_t_i_j  slot s is held by request (i,j) at row t
//   u_t        row t is used
//
// Constraint families, in emission order:
//   ass_x   sum_s x_si = 1                         (each module)
//   ass_y   sum_t y_tij = 1                        (each request)
//   bnd     x_si = 0 where request (i,j) would leave the strip
//   ord     sum_t t y_tij - sum_t t y_ti(j-1) >= 1 (j >= 2)
//   occ     x_si + y_tij - z_s'tij <= 1            (s' in the span from s)
//   excl    sum_ij z_stij <= 1                     (each cell)
//   dly     z_stij - z_s(t+1)ij - y_(t+1)i(j+1) <= 0
//   use     u_t - y_tij >= 0
//   mono    u_(t-1) - u_t >= 0
// Objective: minimize sum_t t u_t.
//
// Rows are generated on demand rather than stored: a 50-slot strip with a
// horizon of a few hundred rows already has on the order of 10^8 occupancy
// rows.

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpgatris/core.hpp"
#include "fpgatris/grid.hpp"
#include "fpgatris/io.hpp"

namespace fpgatris {

class HorizonTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RowFamily {
  kSlotAssignment,
  kTimeAssignment,
  kBoundary,
  kOrder,
  kOccupancy,
  kExclusive,
  kDelay,
  kUsage,
  kUsageMonotone,
};

inline constexpr int kRowFamilyCount = 9;

inline const char* family_prefix(RowFamily f) {
  switch (f) {
    case RowFamily::kSlotAssignment: return "ass_x";
    case RowFamily::kTimeAssignment: return "ass_y";
    case RowFamily::kBoundary: return "bnd";
    case RowFamily::kOrder: return "ord";
    case RowFamily::kOccupancy: return "occ";
    case RowFamily::kExclusive: return "excl";
    case RowFamily::kDelay: return "dly";
    case RowFamily::kUsage: return "use";
    case RowFamily::kUsageMonotone: return "mono";
  }
  return "?";
}

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  std::int64_t coef;
  int var;
};

struct Row {
  RowFamily family;
  std::string name;
  std::vector<Term> terms;
  Sense sense;
  std::int64_t rhs;
};

enum class VarKind { kX, kY, kZ, kU };

// 1-based slot/time, 0-based module/request.
struct VarKey {
  VarKind kind;
  int slot = 0;
  int time = 0;
  int module = -1;
  int request = -1;
};

struct ModelOptions {
  // Declare z only for slots some valid base of the module can reach, and
  // skip rows that would be trivially satisfied as a result.
  bool prune_z = false;
};

using FamilyCounts = std::array<std::int64_t, kRowFamilyCount>;

class IlpModel {
 public:
  IlpModel(Instance instance, int horizon, ModelOptions options = {})
      : instance_(std::move(instance)), horizon_(horizon), options_(options) {
    if (horizon_ < 1) throw HorizonTooSmall("horizon must be >= 1");
    if (instance_.max_length() > horizon_) {
      throw HorizonTooSmall("horizon " + std::to_string(horizon_) +
                            " is shorter than the longest request sequence (" +
                            std::to_string(instance_.max_length()) + ")");
    }
    const int n = width();
    const int m = module_count();
    request_offset_.assign(static_cast<std::size_t>(m) + 1, 0);
    for (int i = 0; i < m; ++i) {
      request_offset_[static_cast<std::size_t>(i) + 1] =
          request_offset_[static_cast<std::size_t>(i)] + instance_.module(i).length();
    }
    const int requests = request_offset_.back();

    keys_.reserve(static_cast<std::size_t>(n) * m +
                  static_cast<std::size_t>(horizon_) * requests * (n + 1) + horizon_);
    for (int i = 0; i < m; ++i) {
      for (int s = 1; s <= n; ++s) keys_.push_back({VarKind::kX, s, 0, i, -1});
    }
    y_offset_ = static_cast<int>(keys_.size());
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < instance_.module(i).length(); ++j) {
        for (int t = 1; t <= horizon_; ++t) keys_.push_back({VarKind::kY, 0, t, i, j});
      }
    }
    z_index_.assign(static_cast<std::size_t>(requests) * horizon_ * n, -1);
    for (int i = 0; i < m; ++i) {
      const ModuleSpec& mod = instance_.module(i);
      const Interval bases = mod.base_range(n);
      for (int j = 0; j < mod.length(); ++j) {
        const Interval reach = reachable(bases, mod.size(j));
        for (int t = 1; t <= horizon_; ++t) {
          for (int s = 1; s <= n; ++s) {
            if (options_.prune_z && !reach.contains(s)) continue;
            z_index_[z_slot(s, t, i, j)] = static_cast<int>(keys_.size());
            keys_.push_back({VarKind::kZ, s, t, i, j});
          }
        }
      }
    }
    u_offset_ = static_cast<int>(keys_.size());
    for (int t = 1; t <= horizon_; ++t) keys_.push_back({VarKind::kU, 0, t, -1, -1});
  }

  const Instance& instance() const { return instance_; }
  int width() const { return instance_.width(); }
  int module_count() const { return instance_.module_count(); }
  int horizon() const { return horizon_; }
  const ModelOptions& options() const { return options_; }

  int variable_count() const { return static_cast<int>(keys_.size()); }
  const VarKey& key(int var) const { return keys_[static_cast<std::size_t>(var)]; }

  int x(int s, int i) const { return i * width() + (s - 1); }
  int y(int t, int i, int j) const {
    return y_offset_ + (request_offset_[static_cast<std::size_t>(i)] + j) * horizon_ +
           (t - 1);
  }
  // -1 when pruned.
  int z(int s, int t, int i, int j) const { return z_index_[z_slot(s, t, i, j)]; }
  int u(int t) const { return u_offset_ + (t - 1); }

  std::int64_t count_of(VarKind kind) const {
    std::int64_t n = 0;
    for (const VarKey& k : keys_) n += k.kind == kind ? 1 : 0;
    return n;
  }

  std::string variable_name(int var) const {
    const VarKey& k = key(var);
    switch (k.kind) {
      case VarKind::kX:
        return "x_" + std::to_string(k.slot) + "_" + std::to_string(k.module + 1);
      case VarKind::kY:
        return "y_" + std::to_string(k.time) + "_" + std::to_string(k.module + 1) +
               "_" + std::to_string(k.request + 1);
      case VarKind::kZ:
        return "z_" + std::to_string(k.slot) + "_" + std::to_string(k.time) + "_" +
               std::to_string(k.module + 1) + "_" + std::to_string(k.request + 1);
      case VarKind::kU:
        return "u_" + std::to_string(k.time);
    }
    return "?";
  }

  // Inverse of variable_name; nullopt for unknown or pruned names.
  std::optional<int> find_variable(std::string_view name) const {
    if (name.size() < 3 || name[1] != '_') return std::nullopt;
    std::vector<int> idx;
    std::size_t pos = 2;
    while (pos <= name.size()) {
      std::size_t end = name.find('_', pos);
      if (end == std::string_view::npos) end = name.size();
      int v = 0;
      auto [p, ec] = std::from_chars(name.data() + pos, name.data() + end, v);
      if (ec != std::errc{} || p != name.data() + end || end == pos) return std::nullopt;
      idx.push_back(v);
      pos = end + 1;
    }
    const auto module_ok = [&](int i) { return i >= 1 && i <= module_count(); };
    const auto slot_ok = [&](int s) { return s >= 1 && s <= width(); };
    const auto time_ok = [&](int t) { return t >= 1 && t <= horizon_; };
    const auto request_ok = [&](int i, int j) {
      return j >= 1 && j <= instance_.module(i - 1).length();
    };
    switch (name[0]) {
      case 'x':
        if (idx.size() != 2 || !slot_ok(idx[0]) || !module_ok(idx[1])) break;
        return x(idx[0], idx[1] - 1);
      case 'y':
        if (idx.size() != 3 || !time_ok(idx[0]) || !module_ok(idx[1]) ||
            !request_ok(idx[1], idx[2])) {
          break;
        }
        return y(idx[0], idx[1] - 1, idx[2] - 1);
      case 'z': {
        if (idx.size() != 4 || !slot_ok(idx[0]) || !time_ok(idx[1]) ||
            !module_ok(idx[2]) || !request_ok(idx[2], idx[3])) {
          break;
        }
        const int v = z(idx[0], idx[1], idx[2] - 1, idx[3] - 1);
        if (v >= 0) return v;
        break;
      }
      case 'u':
        if (idx.size() != 1 || !time_ok(idx[0])) break;
        return u(idx[0]);
      default:
        break;
    }
    return std::nullopt;
  }

  std::vector<Term> objective() const {
    std::vector<Term> terms;
    for (int t = 1; t <= horizon_; ++t) terms.push_back({t, u(t)});
    return terms;
  }

  // Calls f(const Row&) for every constraint in emission order. The row
  // object is reused between calls.
  template <typename F>
  void for_each_row(F&& f) const {
    const int n = width();
    const int m = module_count();
    const int big_t = horizon_;
    Row row;
    const auto emit = [&](RowFamily fam, Sense sense, std::int64_t rhs) {
      row.family = fam;
      row.sense = sense;
      row.rhs = rhs;
      if (!row.terms.empty()) f(static_cast<const Row&>(row));
    };
    const auto start = [&](std::string name) {
      row.name = std::move(name);
      row.terms.clear();
    };
    const auto add = [&](std::int64_t coef, int var) {
      if (var >= 0) row.terms.push_back({coef, var});
    };
    const auto str = [](int v) { return std::to_string(v); };

    for (int i = 0; i < m; ++i) {
      start("ass_x_i" + str(i + 1));
      for (int s = 1; s <= n; ++s) add(1, x(s, i));
      emit(RowFamily::kSlotAssignment, Sense::kEqual, 1);
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < instance_.module(i).length(); ++j) {
        start("ass_y_i" + str(i + 1) + "_j" + str(j + 1));
        for (int t = 1; t <= big_t; ++t) add(1, y(t, i, j));
        emit(RowFamily::kTimeAssignment, Sense::kEqual, 1);
      }
    }
    for (int i = 0; i < m; ++i) {
      const ModuleSpec& mod = instance_.module(i);
      for (int j = 0; j < mod.length(); ++j) {
        const int r = mod.size(j);
        const Interval fixed = r > 0 ? Interval{n - r + 2, n} : Interval{1, -r - 1};
        for (int s = fixed.lo; s <= fixed.hi; ++s) {
          start("bnd_i" + str(i + 1) + "_j" + str(j + 1) + "_s" + str(s));
          add(1, x(s, i));
          emit(RowFamily::kBoundary, Sense::kEqual, 0);
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 1; j < instance_.module(i).length(); ++j) {
        start("ord_i" + str(i + 1) + "_j" + str(j + 1));
        for (int t = 1; t <= big_t; ++t) add(t, y(t, i, j));
        for (int t = 1; t <= big_t; ++t) add(-t, y(t, i, j - 1));
        emit(RowFamily::kOrder, Sense::kGreaterEqual, 1);
      }
    }
    for (int i = 0; i < m; ++i) {
      const ModuleSpec& mod = instance_.module(i);
      const Interval bases = mod.base_range(n);
      for (int j = 0; j < mod.length(); ++j) {
        const int r = mod.size(j);
        for (int s = 1; s <= n; ++s) {
          if (options_.prune_z && !bases.contains(s)) continue;
          const Interval span = clipped_span(s, r);
          for (int t = 1; t <= big_t; ++t) {
            for (int sp = span.lo; sp <= span.hi; ++sp) {
              start("occ_i" + str(i + 1) + "_j" + str(j + 1) + "_s" + str(s) + "_t" +
                    str(t) + "_p" + str(sp));
              add(1, x(s, i));
              add(1, y(t, i, j));
              add(-1, z(sp, t, i, j));
              emit(RowFamily::kOccupancy, Sense::kLessEqual, 1);
            }
          }
        }
      }
    }
    for (int t = 1; t <= big_t; ++t) {
      for (int s = 1; s <= n; ++s) {
        start("excl_s" + str(s) + "_t" + str(t));
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < instance_.module(i).length(); ++j) add(1, z(s, t, i, j));
        }
        emit(RowFamily::kExclusive, Sense::kLessEqual, 1);
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j + 1 < instance_.module(i).length(); ++j) {
        for (int s = 1; s <= n; ++s) {
          for (int t = 1; t < big_t; ++t) {
            if (z(s, t, i, j) < 0) continue;
            start("dly_i" + str(i + 1) + "_j" + str(j + 1) + "_s" + str(s) + "_t" +
                  str(t));
            add(1, z(s, t, i, j));
            add(-1, z(s, t + 1, i, j));
            add(-1, y(t + 1, i, j + 1));
            emit(RowFamily::kDelay, Sense::kLessEqual, 0);
          }
        }
      }
    }
    for (int t = 1; t <= big_t; ++t) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < instance_.module(i).length(); ++j) {
          start("use_t" + str(t) + "_i" + str(i + 1) + "_j" + str(j + 1));
          add(1, u(t));
          add(-1, y(t, i, j));
          emit(RowFamily::kUsage, Sense::kGreaterEqual, 0);
        }
      }
    }
    for (int t = 2; t <= big_t; ++t) {
      start("mono_t" + str(t));
      add(1, u(t - 1));
      add(-1, u(t));
      emit(RowFamily::kUsageMonotone, Sense::kGreaterEqual, 0);
    }
  }

  FamilyCounts row_counts() const {
    FamilyCounts counts{};
    for_each_row([&](const Row& r) { ++counts[static_cast<std::size_t>(r.family)]; });
    return counts;
  }

 private:
  // Span of a size-r request from base s, clipped to the strip.
  Interval clipped_span(int s, int r) const {
    return r > 0 ? Interval{s, std::min(width(), s + r - 1)}
                 : Interval{std::max(1, s + r + 1), s};
  }

  // Union of the request's spans over all valid bases.
  static Interval reachable(Interval bases, int r) {
    if (bases.empty()) return bases;
    return r > 0 ? Interval{bases.lo, bases.hi + r - 1}
                 : Interval{bases.lo + r + 1, bases.hi};
  }

  std::size_t z_slot(int s, int t, int i, int j) const {
    const std::size_t req =
        static_cast<std::size_t>(request_offset_[static_cast<std::size_t>(i)] + j);
    return (req * horizon_ + static_cast<std::size_t>(t - 1)) * width() +
           static_cast<std::size_t>(s - 1);
  }

  Instance instance_;
  int horizon_;
  ModelOptions options_;
  std::vector<int> request_offset_;
  std::vector<VarKey> keys_;
  std::vector<int> z_index_;
  int y_offset_ = 0;
  int u_offset_ = 0;
};

inline IlpModel build_model(const Instance& instance, int horizon,
                            ModelOptions options = {}) {
  return IlpModel(instance, horizon, options);
}

namespace detail {

inline void write_terms(std::ostream& out, const IlpModel& model,
                        const std::vector<Term>& terms) {
  constexpr int kTermsPerLine = 8;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Term& term = terms[k];
    if (k > 0 && k % kTermsPerLine == 0) out << "\n   ";
    const std::int64_t mag = term.coef < 0 ? -term.coef : term.coef;
    if (k == 0) {
      if (term.coef < 0) out << "- ";
    } else {
      out << (term.coef < 0 ? " - " : " + ");
    }
    if (mag != 1) out << mag << ' ';
    out << model.variable_name(term.var);
  }
}

}  // namespace detail

// Writes the model in CPLEX LP text form. Output depends only on the model.
inline void emit_text(const IlpModel& model, std::ostream& out) {
  out << "\\ makespan model: N=" << model.width() << " M=" << model.module_count()
      << " T=" << model.horizon() << "\n";
  out << "Minimize\n obj: ";
  detail::write_terms(out, model, model.objective());
  out << "\nSubject To\n";
  model.for_each_row([&](const Row& row) {
    out << ' ' << row.name << ": ";
    detail::write_terms(out, model, row.terms);
    switch (row.sense) {
      case Sense::kLessEqual: out << " <= "; break;
      case Sense::kGreaterEqual: out << " >= "; break;
      case Sense::kEqual: out << " = "; break;
    }
    out << row.rhs << "\n";
  });
  out << "Binary\n";
  for (int v = 0; v < model.variable_count(); ++v) {
    out << ' ' << model.variable_name(v) << "\n";
  }
  out << "End\n";
}

inline std::string emit_text(const IlpModel& model) {
  std::ostringstream out;
  emit_text(model, out);
  return out.str();
}

// A 0/1 value for every model variable.
struct Assignment {
  std::vector<std::uint8_t> values;

  explicit Assignment(const IlpModel& model)
      : values(static_cast<std::size_t>(model.variable_count()), 0) {}

  void set(int var, bool v = true) {
    if (var >= 0) values[static_cast<std::size_t>(var)] = v ? 1 : 0;
  }
  int get(int var) const { return values[static_cast<std::size_t>(var)]; }
};

// x from base slots, y from start times, z from every held cell, u_t = 1
// iff t <= makespan. Infeasible schedules are converted as-is so the checker
// can point at the broken rows; cells outside the strip or horizon are
// dropped.
inline Assignment assignment_from_schedule(const IlpModel& model,
                                           const Schedule& schedule) {
  const Instance& inst = model.instance();
  if (static_cast<int>(schedule.placements.size()) != inst.module_count()) {
    throw std::invalid_argument("schedule and model have different module counts");
  }
  const int k = makespan(schedule);
  if (k > model.horizon()) {
    throw HorizonTooSmall("schedule makespan " + std::to_string(k) +
                          " exceeds horizon " + std::to_string(model.horizon()));
  }
  const int n = model.width();
  const int big_t = model.horizon();
  Assignment a(model);
  for (int i = 0; i < inst.module_count(); ++i) {
    const ModuleSpec& mod = inst.module(i);
    const Placement& p = schedule.placements[static_cast<std::size_t>(i)];
    if (static_cast<int>(p.start_times.size()) != mod.length()) {
      throw std::invalid_argument("placement " + std::to_string(i + 1) +
                                  " has the wrong number of starts");
    }
    if (p.base_slot >= 1 && p.base_slot <= n) a.set(model.x(p.base_slot, i));
    for (int j = 0; j < mod.length(); ++j) {
      const int t0 = p.start_times[static_cast<std::size_t>(j)];
      if (t0 >= 1 && t0 <= big_t) a.set(model.y(t0, i, j));
      const Interval span = request_span(p.base_slot, mod.size(j));
      const Interval rows = p.active_rows(j);
      for (int t = std::max(1, rows.lo); t <= std::min(big_t, rows.hi); ++t) {
        for (int s = std::max(1, span.lo); s <= std::min(n, span.hi); ++s) {
          a.set(model.z(s, t, i, j));
        }
      }
    }
  }
  for (int t = 1; t <= std::min(k, big_t); ++t) a.set(model.u(t));
  return a;
}

struct AssignmentReport {
  std::vector<std::string> violated;
  FamilyCounts violated_by_family{};
  std::int64_t objective = 0;

  bool ok() const { return violated.empty(); }
  std::int64_t violations(RowFamily f) const {
    return violated_by_family[static_cast<std::size_t>(f)];
  }
};

// Evaluates every row of the model under `assignment`.
inline AssignmentReport check_assignment(const IlpModel& model,
                                         const Assignment& assignment) {
  if (assignment.values.size() != static_cast<std::size_t>(model.variable_count())) {
    throw std::invalid_argument("assignment size does not match the model");
  }
  AssignmentReport report;
  for (const Term& t : model.objective()) report.objective += t.coef * assignment.get(t.var);
  model.for_each_row([&](const Row& row) {
    std::int64_t lhs = 0;
    for (const Term& t : row.terms) lhs += t.coef * assignment.get(t.var);
    bool holds = false;
    switch (row.sense) {
      case Sense::kLessEqual: holds = lhs <= row.rhs; break;
      case Sense::kGreaterEqual: holds = lhs >= row.rhs; break;
      case Sense::kEqual: holds = lhs == row.rhs; break;
    }
    if (!holds) {
      report.violated.push_back(row.name);
      ++report.violated_by_family[static_cast<std::size_t>(row.family)];
    }
  });
  return report;
}

// Reads `name value` pairs, one per line; unlisted variables are 0. Values
// within 1e-6 of 0 or 1 are accepted. Blank lines and '#' comments are
// skipped.
inline Assignment parse_solution(std::string_view text, const IlpModel& model) {
  Assignment a(model);
  std::vector<bool> seen(static_cast<std::size_t>(model.variable_count()), false);
  for (const detail::Line& line : detail::tokenize(text)) {
    if (line.tokens.front().front() == '#') continue;
    if (line.tokens.size() != 2) {
      throw FormatError(line.number, "expected '<variable> <value>'");
    }
    const std::optional<int> var = model.find_variable(line.tokens[0]);
    if (!var) {
      throw FormatError(line.number,
                        "unknown variable '" + std::string(line.tokens[0]) + "'");
    }
    if (seen[static_cast<std::size_t>(*var)]) {
      throw FormatError(line.number, "duplicate variable " + std::string(line.tokens[0]));
    }
    seen[static_cast<std::size_t>(*var)] = true;
    double value = 0;
    try {
      std::size_t used = 0;
      const std::string tok(line.tokens[1]);
      value = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw FormatError(line.number, "bad value '" + std::string(line.tokens[1]) + "'");
    }
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-6 || (rounded != 0.0 && rounded != 1.0)) {
      throw FormatError(line.number, "value is not binary: " + std::string(line.tokens[1]));
    }
    a.set(*var, rounded == 1.0);
  }
  return a;
}

inline std::string write_solution(const IlpModel& model, const Assignment& a) {
  std::ostringstream out;
  for (int v = 0; v < model.variable_count(); ++v) {
    if (a.get(v) != 0) out << model.variable_name(v) << " 1\n";
  }
  return out.str();
}

}  // namespace fpgatris
