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

// Command-line front end. Exit status: 0 success, 1 infeasibility or
// violation found, 2 usage, format or limit errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpgatris/fpgatris.hpp"

namespace {

using namespace fpgatris;

constexpr int kOk = 0;
constexpr int kFinding = 1;
constexpr int kUsage = 2;

struct SolveArgs {
  std::string algo;
  std::string instance;
  std::string out;
};

struct GenerateArgs {
  int slots = 50;
  int modules = 20;
  double rmax_frac = 0.5;
  std::uint64_t seed = 1;
  std::string sign_mode = "all_right";
  std::string out;
};

struct EmitArgs {
  std::string instance;
  std::optional<int> horizon;
  bool prune_z = false;
  std::string out;
};

struct CheckArgs {
  std::string instance;
  std::string schedule;
  std::string solution;
  std::optional<int> horizon;
  bool ilp = false;
};

struct ExactArgs {
  std::string instance;
  std::uint64_t node_budget = OracleLimits{}.node_budget;
  bool no_delays = false;
  std::string out;
};

struct BenchArgs {
  std::string sweep = "0.1:0.9:0.1";
  int runs = 20;
  std::string algos = "ff,ffd,bestfit,tabu";
  std::string out_prefix;
  int slots = 50;
  int modules = 20;
  std::uint64_t seed = 1;
  std::string sign_mode = "all_right";
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

std::string summary_line(const HeuristicResult& r) {
  return "makespan " + std::to_string(r.makespan) + " delays " +
         std::to_string(r.delays) + " evals " + std::to_string(r.evaluations) + "\n";
}

int run_solve(const SolveArgs& args) {
  const std::optional<Algorithm> algo = parse_algorithm(args.algo);
  if (!algo) throw CLI::ValidationError("--algo", "must be one of ff, ffd, bestfit, tabu");
  const Instance instance = parse_instance(read_file(args.instance));
  const HeuristicResult result = run_heuristic(*algo, instance);
  const FeasibilityReport check = check_feasible(instance, result.schedule);
  if (!check.ok()) {
    std::cerr << "internal error: infeasible schedule: " << check.message << "\n";
    return kFinding;
  }
  emit(args.out, write_schedule(result.schedule));
  if (*algo == Algorithm::kTabu) {
    std::cout << "order";
    for (int i : result.order) std::cout << ' ' << (i + 1);
    std::cout << "\n";
  }
  std::cout << summary_line(result);
  return kOk;
}

int run_generate(const GenerateArgs& args) {
  GenParams params;
  params.width = args.slots;
  params.modules = args.modules;
  params.rmax_fraction = args.rmax_frac;
  params.seed = args.seed;
  params.sign_mode = parse_sign_mode(args.sign_mode);
  emit(args.out, write_instance(generate_instance(params)));
  return kOk;
}

int run_emit_ilp(const EmitArgs& args) {
  const Instance instance = parse_instance(read_file(args.instance));
  const int horizon = args.horizon ? *args.horizon : tabu_search(instance).makespan;
  const IlpModel model = build_model(instance, horizon, ModelOptions{args.prune_z});
  if (args.out.empty() || args.out == "-") {
    emit_text(model, std::cout);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + args.out);
    emit_text(model, out);
  }
  std::cerr << "horizon " << horizon << " variables " << model.variable_count() << "\n";
  return kOk;
}

void print_assignment_report(const AssignmentReport& r) {
  constexpr std::size_t kShown = 20;
  if (r.ok()) {
    std::cout << "ilp: ok objective " << r.objective << "\n";
    return;
  }
  std::cout << "ilp: " << r.violated.size() << " violated rows objective " << r.objective
            << "\n";
  for (std::size_t k = 0; k < r.violated.size() && k < kShown; ++k) {
    std::cout << "  " << r.violated[k] << "\n";
  }
  if (r.violated.size() > kShown) std::cout << "  ...\n";
}

int run_check(const CheckArgs& args) {
  const Instance instance = parse_instance(read_file(args.instance));
  if (!args.solution.empty()) {
    if (!args.horizon) throw CLI::ValidationError("--horizon", "required with --solution");
    const IlpModel model = build_model(instance, *args.horizon);
    const AssignmentReport r =
        check_assignment(model, parse_solution(read_file(args.solution), model));
    print_assignment_report(r);
    return r.ok() ? kOk : kFinding;
  }
  if (args.schedule.empty()) {
    throw CLI::ValidationError("--schedule", "one of --schedule or --solution is required");
  }
  const Schedule schedule = parse_schedule(read_file(args.schedule), instance);
  const FeasibilityReport feasible = check_feasible(instance, schedule);
  int status = kOk;
  if (feasible.ok()) {
    std::cout << "grid: ok makespan " << makespan(schedule) << " delays "
              << delay_count(schedule) << " lb " << lower_bound(instance) << "\n";
  } else {
    std::cout << "grid: " << rule_name(feasible.rule) << " violation: " << feasible.message
              << "\n";
    status = kFinding;
  }
  if (args.ilp) {
    const int k = makespan(schedule);
    const int horizon = args.horizon ? *args.horizon : std::max(k, instance.max_length());
    const IlpModel model = build_model(instance, horizon);
    const AssignmentReport r = check_assignment(model, assignment_from_schedule(model, schedule));
    print_assignment_report(r);
    if (!r.ok()) status = kFinding;
    const std::int64_t expected = static_cast<std::int64_t>(k) * (k + 1) / 2;
    if (r.objective != expected) {
      std::cout << "ilp: objective " << r.objective << " differs from k(k+1)/2 = " << expected
                << "\n";
      status = kFinding;
    }
  }
  return status;
}

int run_exact(const ExactArgs& args) {
  const Instance instance = parse_instance(read_file(args.instance));
  OracleOptions options;
  options.limits.node_budget = args.node_budget;
  options.allow_delays = !args.no_delays;
  const ExactResult r = solve_exact(instance, options);
  emit(args.out, write_schedule(r.witness));
  if (r.optimal()) {
    std::cout << "optimum " << r.makespan << " lb " << lower_bound(instance) << " nodes "
              << r.nodes << "\n";
    return kOk;
  }
  std::cout << "budget exceeded after " << r.nodes << " nodes; incumbent " << r.makespan
            << " (not proven optimal)\n";
  return kFinding;
}

int run_bench(const BenchArgs& args) {
  BenchConfig config;
  config.sweep = parse_sweep(args.sweep);
  config.runs = args.runs;
  config.algorithms.clear();
  std::stringstream list(args.algos);
  for (std::string name; std::getline(list, name, ',');) {
    const std::optional<Algorithm> a = parse_algorithm(name);
    if (!a) throw CLI::ValidationError("--algos", "unknown algorithm '" + name + "'");
    config.algorithms.push_back(*a);
  }
  if (config.algorithms.empty()) throw CLI::ValidationError("--algos", "empty list");
  config.base.width = args.slots;
  config.base.modules = args.modules;
  config.base.seed = args.seed;
  config.base.sign_mode = parse_sign_mode(args.sign_mode);

  const BenchReport report = run_benchmark(config);
  write_file(args.out_prefix + ".csv", write_csv(report));
  write_file(args.out_prefix + "_summary.txt", write_summary(report));
  write_file(args.out_prefix + "_plot.dat", write_plot_data(report));
  std::cout << write_summary(report);
  for (const std::string& d : report.defects) std::cout << "DEFECT " << d << "\n";
  return report.defects.empty() ? kOk : kFinding;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Module placement on a slot strip over discrete time"};
  app.require_subcommand(1);

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run a placement heuristic");
  solve_cmd->add_option("--algo", solve.algo, "ff | ffd | bestfit | tabu")->required();
  solve_cmd->add_option("--instance", solve.instance, "Instance file")->required();
  solve_cmd->add_option("--out", solve.out, "Schedule output file (default stdout)");

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Generate a random instance");
  gen_cmd->add_option("--slots", gen.slots, "Strip width N")->required();
  gen_cmd->add_option("--modules", gen.modules, "Module count M")->required();
  gen_cmd->add_option("--rmax-frac", gen.rmax_frac, "Request size limit as a fraction of N")
      ->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--sign-mode", gen.sign_mode, "all_right | random");
  gen_cmd->add_option("--out", gen.out, "Instance output file")->required();

  EmitArgs emit_args;
  CLI::App* emit_cmd = app.add_subcommand("emit-ilp", "Write the 0-1 model in LP format");
  emit_cmd->add_option("--instance", emit_args.instance, "Instance file")->required();
  emit_cmd->add_option("--horizon", emit_args.horizon,
                       "Time rows T (default: tabu search makespan)");
  emit_cmd->add_flag("--prune-z", emit_args.prune_z,
                     "Declare occupancy variables only for reachable slots");
  emit_cmd->add_option("--out", emit_args.out, "LP output file")->required();

  CheckArgs check;
  CLI::App* check_cmd = app.add_subcommand("check", "Verify a schedule or a 0-1 solution");
  check_cmd->add_option("--instance", check.instance, "Instance file")->required();
  check_cmd->add_option("--schedule", check.schedule, "Schedule file");
  check_cmd->add_option("--solution", check.solution, "'<variable> <value>' pairs");
  check_cmd->add_option("--horizon", check.horizon, "Model horizon T");
  check_cmd->add_flag("--ilp", check.ilp, "Also check the schedule against every model row");

  ExactArgs exact;
  CLI::App* exact_cmd = app.add_subcommand("exact", "Solve a tiny instance to optimality");
  exact_cmd->add_option("--instance", exact.instance, "Instance file")->required();
  exact_cmd->add_option("--node-budget", exact.node_budget, "Search node budget");
  exact_cmd->add_flag("--no-delays", exact.no_delays, "Forbid delayed requests");
  exact_cmd->add_option("--out", exact.out, "Witness schedule file (default stdout)");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run the request-size sweep");
  bench_cmd->add_option("--sweep", bench.sweep, "A:B:STEP rmax fractions")->required();
  bench_cmd->add_option("--runs", bench.runs, "Instances per sweep point")->required();
  bench_cmd->add_option("--algos", bench.algos, "Comma list of ff,ffd,bestfit,tabu")
      ->required();
  bench_cmd->add_option("--out-prefix", bench.out_prefix, "Output path prefix")->required();
  bench_cmd->add_option("--slots", bench.slots, "Strip width N");
  bench_cmd->add_option("--modules", bench.modules, "Module count M");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--sign-mode", bench.sign_mode, "all_right | random");

  const auto usage_of = [&]() -> std::string {
    for (CLI::App* sub : app.get_subcommands()) return sub->help();
    return app.help();
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << usage_of();
    return kUsage;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve);
    if (gen_cmd->parsed()) return run_generate(gen);
    if (emit_cmd->parsed()) return run_emit_ilp(emit_args);
    if (check_cmd->parsed()) return run_check(check);
    if (exact_cmd->parsed()) return run_exact(exact);
    if (bench_cmd->parsed()) return run_bench(bench);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << usage_of();
    return kUsage;
  } catch (const LimitsExceeded& e) {
    std::cerr << "error: instance exceeds oracle limits: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
