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

#include "fpgatris/ilp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fpgatris/heuristics.hpp"
#include "test_instances.hpp"

namespace fpgatris {
namespace {

std::int64_t family(const FamilyCounts& c, RowFamily f) {
  return c[static_cast<std::size_t>(f)];
}

// Closed-form row counts of the unpruned model.
FamilyCounts expected_counts(const Instance& inst, int big_t) {
  const std::int64_t n = inst.width();
  const std::int64_t t = big_t;
  FamilyCounts c{};
  auto at = [&](RowFamily f) -> std::int64_t& { return c[static_cast<std::size_t>(f)]; };
  for (const ModuleSpec& m : inst.modules()) {
    at(RowFamily::kSlotAssignment) += 1;
    at(RowFamily::kTimeAssignment) += m.length();
    at(RowFamily::kOrder) += m.length() - 1;
    at(RowFamily::kDelay) += (m.length() - 1) * n * (t - 1);
    at(RowFamily::kUsage) += t * m.length();
    for (const Request& r : m.requests) {
      at(RowFamily::kBoundary) += r.magnitude() - 1;
      for (int s = 1; s <= n; ++s) {
        const Interval span = request_span(s, r.size());
        const std::int64_t clipped =
            std::min<std::int64_t>(n, span.hi) - std::max(1, span.lo) + 1;
        at(RowFamily::kOccupancy) += t * clipped;
      }
    }
  }
  if (inst.module_count() > 0) at(RowFamily::kExclusive) = n * t;
  at(RowFamily::kUsageMonotone) = t - 1;
  return c;
}

TEST(BuildModel, VariableCountsForSmallInstance) {
  const IlpModel model = build_model(testing::small_instance(), 4);
  EXPECT_EQ(model.count_of(VarKind::kX), 12);
  EXPECT_EQ(model.count_of(VarKind::kY), 20);
  EXPECT_EQ(model.count_of(VarKind::kZ), 80);
  EXPECT_EQ(model.count_of(VarKind::kU), 4);
  EXPECT_EQ(model.variable_count(), 116);
}

TEST(BuildModel, RowCountsForSmallInstance) {
  const FamilyCounts c = build_model(testing::small_instance(), 4).row_counts();
  EXPECT_EQ(family(c, RowFamily::kSlotAssignment), 3);
  EXPECT_EQ(family(c, RowFamily::kTimeAssignment), 5);
  EXPECT_EQ(family(c, RowFamily::kOrder), 2);
  EXPECT_EQ(family(c, RowFamily::kExclusive), 16);
  EXPECT_EQ(family(c, RowFamily::kUsageMonotone), 3);
  EXPECT_EQ(c, expected_counts(testing::small_instance(), 4));
}

TEST(BuildModel, RowCountsMatchClosedForm) {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    const Instance inst = testing::random_tiny(rng);
    const int big_t = inst.max_length() + static_cast<int>(rng() % 4);
    const IlpModel model = build_model(inst, big_t);
    EXPECT_EQ(model.row_counts(), expected_counts(inst, big_t));
    EXPECT_EQ(model.variable_count(),
              inst.width() * inst.module_count() +
                  big_t * inst.total_requests() * (inst.width() + 1) + big_t);
  }
}

TEST(BuildModel, BoundaryFixingsForLeftGrowth) {
  const Instance inst(4, {ModuleSpec{-2}});
  const IlpModel model = build_model(inst, 1);
  std::vector<std::string> names;
  model.for_each_row([&](const Row& r) {
    if (r.family != RowFamily::kBoundary) return;
    names.push_back(r.name);
    ASSERT_EQ(r.terms.size(), 1u);
    EXPECT_EQ(model.variable_name(r.terms[0].var), "x_1_1");
    EXPECT_EQ(r.sense, Sense::kEqual);
    EXPECT_EQ(r.rhs, 0);
  });
  EXPECT_EQ(names, (std::vector<std::string>{"bnd_i1_j1_s1"}));
}

TEST(BuildModel, BoundaryFixingsForRightGrowth) {
  const IlpModel model = build_model(Instance(5, {ModuleSpec{3}}), 1);
  std::set<std::string> fixed;
  model.for_each_row([&](const Row& r) {
    if (r.family == RowFamily::kBoundary) fixed.insert(model.variable_name(r.terms[0].var));
  });
  // s from N - r + 2 = 4 to N = 5.
  EXPECT_EQ(fixed, (std::set<std::string>{"x_4_1", "x_5_1"}));
}

TEST(BuildModel, OrderRowCoefficients) {
  const IlpModel model = build_model(Instance(2, {ModuleSpec{1, 1}}), 3);
  int seen = 0;
  model.for_each_row([&](const Row& r) {
    if (r.family != RowFamily::kOrder) return;
    ++seen;
    EXPECT_EQ(r.name, "ord_i1_j2");
    EXPECT_EQ(r.sense, Sense::kGreaterEqual);
    EXPECT_EQ(r.rhs, 1);
    ASSERT_EQ(r.terms.size(), 6u);
    EXPECT_EQ(model.variable_name(r.terms[2].var), "y_3_1_2");
    EXPECT_EQ(r.terms[2].coef, 3);
    EXPECT_EQ(model.variable_name(r.terms[4].var), "y_2_1_1");
    EXPECT_EQ(r.terms[4].coef, -2);
  });
  EXPECT_EQ(seen, 1);
}

TEST(BuildModel, RejectsShortHorizon) {
  EXPECT_THROW(build_model(testing::small_instance(), 1), HorizonTooSmall);
  EXPECT_THROW(build_model(Instance(3, {}), 0), HorizonTooSmall);
  EXPECT_NO_THROW(build_model(testing::small_instance(), 2));
}

TEST(BuildModel, VariableNamesRoundTrip) {
  const IlpModel model = build_model(testing::small_instance(), 3);
  for (int v = 0; v < model.variable_count(); ++v) {
    EXPECT_EQ(model.find_variable(model.variable_name(v)), v);
  }
  EXPECT_FALSE(model.find_variable("x_5_1").has_value());
  EXPECT_FALSE(model.find_variable("y_1_1_3").has_value());
  EXPECT_FALSE(model.find_variable("u_0").has_value());
  EXPECT_FALSE(model.find_variable("w_1").has_value());
  EXPECT_FALSE(model.find_variable("x_1_").has_value());
}

std::vector<std::string> section(const std::string& doc, const std::string& head,
                                 const std::string& next) {
  std::istringstream in(doc);
  std::vector<std::string> lines;
  bool inside = false;
  for (std::string line; std::getline(in, line);) {
    if (line == head) {
      inside = true;
      continue;
    }
    if (line == next) break;
    if (inside) lines.push_back(line);
  }
  return lines;
}

TEST(EmitText, DeclaresEveryVariableAsBinary) {
  const IlpModel model = build_model(testing::small_instance(), 4);
  const std::string doc = emit_text(model);
  const std::vector<std::string> binaries = section(doc, "Binary", "End");
  EXPECT_EQ(binaries.size(), 116u);
  const std::set<std::string> unique(binaries.begin(), binaries.end());
  EXPECT_EQ(unique.size(), 116u);
  EXPECT_TRUE(unique.contains(" z_4_4_3_2"));
  EXPECT_EQ(doc.substr(doc.size() - 4), "End\n");
  EXPECT_NE(doc.find("Minimize\n obj: u_1 + 2 u_2 + 3 u_3 + 4 u_4\n"), std::string::npos);
  EXPECT_NE(doc.find(" ord_i3_j2: "), std::string::npos);
  EXPECT_NE(doc.find(" bnd_i3_j2_s2: x_2_3 = 0\n"), std::string::npos);
}

TEST(EmitText, EveryReferencedNameIsDeclared) {
  const IlpModel model = build_model(testing::small_instance(), 4);
  const std::string doc = emit_text(model);
  const std::vector<std::string> binaries = section(doc, "Binary", "End");
  std::set<std::string> declared;
  for (const std::string& b : binaries) declared.insert(b.substr(1));
  const std::vector<std::string> rows = section(doc, "Subject To", "Binary");
  std::size_t named_rows = 0;
  for (const std::string& line : rows) {
    std::istringstream tok(line);
    for (std::string w; tok >> w;) {
      if (w.back() == ':') {
        ++named_rows;
        continue;
      }
      if (w[0] == 'x' || w[0] == 'y' || w[0] == 'z' || w[0] == 'u') {
        EXPECT_TRUE(declared.contains(w)) << w;
      }
    }
  }
  std::int64_t total = 0;
  for (std::int64_t c : model.row_counts()) total += c;
  EXPECT_EQ(static_cast<std::int64_t>(named_rows), total);
}

TEST(EmitText, Deterministic) {
  const IlpModel a = build_model(testing::small_instance(), 4);
  const IlpModel b = build_model(testing::small_instance(), 4);
  EXPECT_EQ(emit_text(a), emit_text(a));
  EXPECT_EQ(emit_text(a), emit_text(b));
}

TEST(EmitText, EmptyModelHasOnlyUsageRows) {
  const IlpModel model = build_model(Instance(3, {}), 2);
  const std::string doc = emit_text(model);
  EXPECT_EQ(doc.find("ass_"), std::string::npos);
  EXPECT_NE(doc.find("obj: u_1 + 2 u_2"), std::string::npos);
  EXPECT_EQ(section(doc, "Subject To", "Binary"),
            (std::vector<std::string>{" mono_t2: u_1 - u_2 >= 0"}));
}

TEST(AssignmentFromSchedule, SmallScheduleSatisfiesEveryRow) {
  const IlpModel model = build_model(testing::small_instance(), 4);
  const Assignment a = assignment_from_schedule(model, testing::small_schedule());
  for (int t = 1; t <= 4; ++t) EXPECT_EQ(a.get(model.u(t)), 1);
  const AssignmentReport r = check_assignment(model, a);
  EXPECT_TRUE(r.ok()) << (r.violated.empty() ? "" : r.violated.front());
  EXPECT_EQ(r.objective, 10);
}

TEST(AssignmentFromSchedule, SingleRequest) {
  const IlpModel model = build_model(Instance(1, {ModuleSpec{1}}), 2);
  const Assignment a = assignment_from_schedule(model, Schedule{{Placement{1, {1}}}});
  EXPECT_EQ(write_solution(model, a), "x_1_1 1\ny_1_1_1 1\nz_1_1_1_1 1\nu_1 1\n");
  EXPECT_EQ(a.get(model.u(2)), 0);
  EXPECT_TRUE(check_assignment(model, a).ok());
}

TEST(AssignmentFromSchedule, HeldRowsMatchGridCells) {
  const Instance inst(4, {ModuleSpec{2, 2, 4}, ModuleSpec{2}});
  // Module 1 request 2 is held through row 3 while module 2 uses 3-4 there.
  const Schedule sched{{Placement{1, {1, 2, 4}}, Placement{3, {3}}}};
  ASSERT_TRUE(check_feasible(inst, sched).ok());
  const IlpModel model = build_model(inst, 4);
  const Assignment a = assignment_from_schedule(model, sched);
  const OccupancyGrid grid = build_grid(inst, sched);
  for (int t = 1; t <= 4; ++t) {
    for (int s = 1; s <= 4; ++s) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < inst.module(i).length(); ++j) {
          EXPECT_EQ(a.get(model.z(s, t, i, j)), grid.owner(s, t) == (Owner{i, j}) ? 1 : 0);
        }
      }
    }
  }
  EXPECT_EQ(a.get(model.z(1, 3, 0, 1)), 1);
  EXPECT_TRUE(check_assignment(model, a).ok());
}

TEST(AssignmentFromSchedule, RejectsMakespanBeyondHorizon) {
  const IlpModel model = build_model(testing::small_instance(), 3);
  EXPECT_THROW(assignment_from_schedule(model, testing::small_schedule()), HorizonTooSmall);
}

TEST(CheckAssignment, SharedCellViolatesExclusivity) {
  const Instance inst(2, {ModuleSpec{1}, ModuleSpec{1}});
  const IlpModel model = build_model(inst, 1);
  const Schedule sched{{Placement{1, {1}}, Placement{1, {1}}}};
  const AssignmentReport r = check_assignment(model, assignment_from_schedule(model, sched));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.violations(RowFamily::kExclusive), 1);
  EXPECT_EQ(r.violated, (std::vector<std::string>{"excl_s1_t1"}));
}

TEST(CheckAssignment, StartNotAfterPredecessorViolatesOrder) {
  const Instance inst(2, {ModuleSpec{1, 1}});
  const IlpModel model = build_model(inst, 3);
  for (const std::vector<int>& starts : {std::vector<int>{2, 2}, std::vector<int>{3, 1}}) {
    const AssignmentReport r = check_assignment(
        model, assignment_from_schedule(model, Schedule{{Placement{1, starts}}}));
    EXPECT_GE(r.violations(RowFamily::kOrder), 1);
    EXPECT_NE(std::find(r.violated.begin(), r.violated.end(), "ord_i1_j2"), r.violated.end());
  }
}

TEST(CheckAssignment, BaseOffStripViolatesBoundary) {
  const Instance inst(4, {ModuleSpec{3}});
  const IlpModel model = build_model(inst, 1);
  const AssignmentReport r =
      check_assignment(model, assignment_from_schedule(model, Schedule{{Placement{3, {1}}}}));
  EXPECT_EQ(r.violated, (std::vector<std::string>{"bnd_i1_j1_s3"}));
}

TEST(CheckAssignment, MissingHoldViolatesDelayRow) {
  const Instance inst(2, {ModuleSpec{1, 1}});
  const IlpModel model = build_model(inst, 3);
  Assignment a = assignment_from_schedule(model, Schedule{{Placement{1, {1, 3}}}});
  ASSERT_TRUE(check_assignment(model, a).ok());
  a.set(model.z(1, 2, 0, 0), false);
  const AssignmentReport r = check_assignment(model, a);
  EXPECT_EQ(r.violated, (std::vector<std::string>{"dly_i1_j1_s1_t1"}));
}

TEST(CheckAssignment, UsageRows) {
  const IlpModel model = build_model(Instance(2, {ModuleSpec{1}}), 3);
  Assignment a = assignment_from_schedule(model, Schedule{{Placement{1, {2}}}});
  ASSERT_TRUE(check_assignment(model, a).ok());
  EXPECT_EQ(check_assignment(model, a).objective, 3);
  a.set(model.u(2), false);
  EXPECT_EQ(check_assignment(model, a).violated, (std::vector<std::string>{"use_t2_i1_j1"}));
  a.set(model.u(2), true);
  a.set(model.u(1), false);
  EXPECT_EQ(check_assignment(model, a).violated, (std::vector<std::string>{"mono_t2"}));
}

// Schedule semantics and the model agree in both directions on random
// tiny instances: feasible schedules satisfy every row with objective
// k(k+1)/2, infeasible ones break at least one row.
TEST(CheckAssignment, AgreesWithCheckFeasible) {
  std::mt19937_64 rng(23);
  int good = 0;
  int bad = 0;
  for (int iter = 0; iter < 1500; ++iter) {
    const Instance inst = testing::random_tiny(rng);
    Schedule sched;
    for (const ModuleSpec& m : inst.modules()) {
      Placement p{std::uniform_int_distribution<int>(1, inst.width())(rng), {}};
      int t = std::uniform_int_distribution<int>(1, 2)(rng);
      for (int j = 0; j < m.length(); ++j) {
        p.start_times.push_back(t);
        t += std::uniform_int_distribution<int>(0, 2)(rng);
      }
      sched.placements.push_back(p);
    }
    const int k = makespan(sched);
    const IlpModel model = build_model(inst, std::max(k, inst.max_length()));
    const AssignmentReport r = check_assignment(model, assignment_from_schedule(model, sched));
    const bool feasible = check_feasible(inst, sched).ok();
    EXPECT_EQ(r.ok(), feasible);
    if (feasible) {
      EXPECT_EQ(r.objective, std::int64_t{k} * (k + 1) / 2);
      ++good;
    } else {
      ++bad;
    }
  }
  EXPECT_GT(good, 100);
  EXPECT_GT(bad, 100);
}

TEST(PruneZ, SmallerModelSameVerdicts) {
  const Instance inst = testing::small_instance();
  const IlpModel full = build_model(inst, 4);
  const IlpModel pruned = build_model(inst, 4, ModelOptions{true});
  EXPECT_LT(pruned.count_of(VarKind::kZ), full.count_of(VarKind::kZ));
  // m3 = [2, 4] anchors only at slot 1, so request 1 reaches slots 1-2.
  EXPECT_GE(pruned.z(2, 1, 2, 0), 0);
  EXPECT_EQ(pruned.z(3, 1, 2, 0), -1);
  const Assignment a = assignment_from_schedule(pruned, testing::small_schedule());
  const AssignmentReport r = check_assignment(pruned, a);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.objective, 10);

  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 200; ++iter) {
    const Instance tiny = testing::random_tiny(rng);
    const HeuristicResult h = best_fit(tiny);
    const IlpModel m = build_model(tiny, h.makespan, ModelOptions{true});
    EXPECT_TRUE(check_assignment(m, assignment_from_schedule(m, h.schedule)).ok());
  }
}

TEST(ParseSolution, RoundTripAndErrors) {
  const IlpModel model = build_model(testing::small_instance(), 4);
  const Assignment a = assignment_from_schedule(model, testing::small_schedule());
  const Assignment b = parse_solution(write_solution(model, a), model);
  EXPECT_EQ(a.values, b.values);

  const Assignment c = parse_solution("# solver output\nu_1 0.9999999\n\nx_1_1 1e-9\n", model);
  EXPECT_EQ(c.get(model.u(1)), 1);
  EXPECT_EQ(c.get(model.x(1, 0)), 0);

  EXPECT_THROW(parse_solution("w_1 1\n", model), FormatError);
  EXPECT_THROW(parse_solution("u_1 0.5\n", model), FormatError);
  EXPECT_THROW(parse_solution("u_1 2\n", model), FormatError);
  EXPECT_THROW(parse_solution("u_1\n", model), FormatError);
  EXPECT_THROW(parse_solution("u_1 1\nu_1 1\n", model), FormatError);
  EXPECT_THROW(parse_solution("u_1 one\n", model), FormatError);
}

}  // namespace
}  // namespace fpgatris
