#include "cvp/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cvp/bench.h"
#include "cvp/compile.h"
#include "cvp/generators.h"
#include "cvp/heuristics.h"
#include "cvp/io.h"
#include "cvp/search.h"

namespace cvp {

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitUnsolved = 1;
constexpr int kExitUsage = 2;

struct SearchFlags {
  int samples = 5;
  std::uint64_t seed = 1;
  double timeout_seconds = 0.0;  // 0 = none
  std::uint64_t max_nodes = 0;   // 0 = none
  int max_rejections = 100;
  bool no_duplicate_pruning = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--samples", samples, "Successors sampled per partial expansion");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--timeout", timeout_seconds, "Per-search timeout in seconds");
    cmd->add_option("--max-nodes", max_nodes, "Node cap (0 = unlimited)");
    cmd->add_option("--max-rejections", max_rejections, "Rejection budget per control sample");
    cmd->add_flag("--no-duplicate-pruning", no_duplicate_pruning, "Keep duplicate states");
  }

  SearchConfig to_config() const {
    SearchConfig config;
    config.samples_per_expansion = samples;
    config.seed = seed;
    config.max_rejections = max_rejections;
    if (timeout_seconds > 0)
      config.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000));
    if (max_nodes > 0) config.max_nodes = max_nodes;
    config.duplicate_pruning = !no_duplicate_pruning;
    return config;
  }
};

void print_stats(const SearchResult& result) {
  const auto& s = result.stats;
  std::cout << "status: " << status_str(result.status) << "\n"
            << "expansions: " << s.expansions << "\n"
            << "partial_expansions: " << s.partial_expansions << "\n"
            << "samples_drawn: " << s.samples_drawn << "\n"
            << "samples_rejected: " << s.samples_rejected << "\n"
            << "nodes_generated: " << s.nodes_generated << "\n"
            << "duplicates_pruned: " << s.duplicates_pruned << "\n"
            << "dead_ends_pruned: " << s.dead_ends_pruned << "\n"
            << "wall_time_s: " << s.wall_time_seconds << "\n";
  if (s.h_at_init) std::cout << "h_at_init: " << s.h_at_init->str() << "\n";
  if (result.plan) std::cout << "plan_length: " << result.plan->steps.size() << "\n";
}

int cmd_solve(const std::string& problem_path, const std::string& heuristic_name,
              const SearchFlags& flags, const std::string& plan_out) {
  const ParseResult parsed = parse_problem_file(problem_path);
  if (!parsed.fragment.accepted() && (heuristic_name == "hadd" || heuristic_name == "hmrp")) {
    std::cerr << "error: " << parsed.fragment.summary() << "\n";
    return kExitUnsolved;
  }
  const auto heuristic = make_heuristic(heuristic_name, parsed.problem);
  const SearchResult result = dpex(parsed.problem, *heuristic, flags.to_config());
  print_stats(result);
  if (result.status == SearchStatus::Exhausted && result.stats.h_at_init &&
      result.stats.h_at_init->is_infinite()) {
    std::cout << "dead end at initial state\n";
  }
  if (result.plan && !plan_out.empty()) write_json_file(plan_out, serialize_plan(*result.plan));
  return result.status == SearchStatus::Solved ? kExitSuccess : kExitUnsolved;
}

int cmd_compile(const std::string& problem_path, const std::string& mode, const std::string& out,
                bool stats) {
  const ParseResult parsed = parse_problem_file(problem_path);
  if (!parsed.fragment.accepted()) {
    std::cerr << "error: " << parsed.fragment.summary() << "\n";
    return kExitUnsolved;
  }
  SimpleProblem compiled = mode == "optimistic" ? optimistic_compile(parsed.problem)
                                                : signature_compile(parsed.problem);
  if (stats) {
    const StatsRecord record = compile_stats(parsed.problem);
    std::cout << "|A|=" << record.num_actions << " |A_Sigma|=" << record.num_signature_actions
              << " |A_O|=" << record.num_optimistic_actions
              << " |Psi|=" << record.num_conditions << "\n";
  }
  if (!out.empty())
    write_json_file(out, serialize_simple_problem(compiled));
  else if (!stats)
    std::cout << serialize_simple_problem(compiled).dump(2) << "\n";
  return kExitSuccess;
}

int cmd_validate(const std::string& problem_path, const std::string& plan_path) {
  const ParseResult parsed = parse_problem_file(problem_path);
  const Plan plan = parse_plan_file(plan_path);
  const ValidationReport report = validate_plan(parsed.problem, plan);
  std::cout << serialize_report(report, parsed.problem).dump(2) << "\n";
  return report.solution ? kExitSuccess : kExitUnsolved;
}

int cmd_gen(const std::string& domain, int n, const std::string& lo, const std::string& hi,
            const std::string& kind, const std::string& step, std::uint64_t seed,
            const std::string& out) {
  ControlProblem problem;
  const DomainKind dk = kind == "discrete" ? DomainKind::Discrete : DomainKind::Continuous;
  if (domain == "counters") {
    problem = gen_counters(n, Rational::parse(lo), Rational::parse(hi), dk, Rational::parse(step));
  } else if (domain == "random") {
    RandomSpec spec;
    spec.kind = dk;
    problem = gen_random(spec, seed);
  } else {
    std::cerr << "error: unknown domain '" << domain << "' (expected counters or random)\n";
    return kExitUsage;
  }
  const Json doc = serialize_problem(problem);
  if (out.empty())
    std::cout << doc.dump(2) << "\n";
  else
    write_json_file(out, doc);
  return kExitSuccess;
}

int cmd_bench(const std::string& suite_dir, const std::string& heuristics_csv,
              const SearchFlags& flags, const std::string& csv_out, int jobs) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(suite_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "error: no .json instances under " << suite_dir << "\n";
    return kExitUsage;
  }

  std::vector<std::pair<std::string, ControlProblem>> suite;
  for (const auto& file : files)
    suite.emplace_back(fs::path(file).stem().string(), parse_problem_file(file).problem);

  BenchConfig config;
  config.search = flags.to_config();
  config.jobs = jobs;
  config.heuristics.clear();
  std::stringstream ss(heuristics_csv);
  for (std::string token; std::getline(ss, token, ',');)
    if (!token.empty()) config.heuristics.push_back(token);
  if (config.heuristics.empty()) {
    std::cerr << "error: no heuristics selected\n";
    return kExitUsage;
  }

  const auto records = run_benchmark(suite, config);
  if (csv_out.empty()) {
    write_csv(std::cout, records);
  } else {
    std::ofstream out(csv_out);
    if (!out) {
      std::cerr << "error: cannot write " << csv_out << "\n";
      return kExitUsage;
    }
    write_csv(out, records);
  }
  std::cout << "coverage:";
  for (const auto& [heuristic, solved] : coverage_summary(records))
    std::cout << " " << heuristic << "=" << solved << "/" << suite.size();
  std::cout << "\n";
  return kExitSuccess;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Numeric planning with control variables"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Search for a plan with DPEX");
  std::string solve_problem, solve_heuristic = "hadd", plan_out;
  SearchFlags solve_flags;
  solve->add_option("problem", solve_problem, "Problem JSON file")->required();
  solve->add_option("--heuristic", solve_heuristic, "h0, hmgc, hadd or hmrp")
      ->check(CLI::IsMember({"h0", "hmgc", "hadd", "hmrp"}));
  solve_flags.attach(solve);
  solve->add_option("--plan-out", plan_out, "Write the plan to this file");

  // compile
  auto* compile = app.add_subcommand("compile", "Compile away the control variables");
  std::string compile_problem, compile_mode = "signature", compile_out;
  bool compile_stats_flag = false;
  compile->add_option("problem", compile_problem, "Problem JSON file")->required();
  compile->add_option("--mode", compile_mode, "optimistic or signature")
      ->check(CLI::IsMember({"optimistic", "signature"}));
  compile->add_option("--out", compile_out, "Write the compiled task to this file");
  compile->add_flag("--stats", compile_stats_flag, "Print action-set sizes");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a plan against a problem");
  std::string validate_problem, validate_plan_path;
  validate->add_option("problem", validate_problem, "Problem JSON file")->required();
  validate->add_option("plan", validate_plan_path, "Plan JSON file")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  std::string gen_domain, gen_lo = "0", gen_hi = "4", gen_kind = "discrete", gen_step = "1",
              gen_out;
  int gen_n = 4;
  std::uint64_t gen_seed = 1;
  gen->add_option("domain", gen_domain, "counters or random")->required();
  gen->add_option("--n", gen_n, "Size parameter (counters)");
  gen->add_option("--lo", gen_lo, "Control domain lower bound");
  gen->add_option("--hi", gen_hi, "Control domain upper bound");
  gen->add_option("--kind", gen_kind, "continuous or discrete")
      ->check(CLI::IsMember({"continuous", "discrete"}));
  gen->add_option("--step", gen_step, "Grid step for discrete domains");
  gen->add_option("--seed", gen_seed, "Seed (random domain)");
  gen->add_option("--out", gen_out, "Write the instance to this file");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a suite and emit CSV records");
  std::string bench_dir, bench_heuristics = "h0,hmgc,hadd,hmrp", bench_csv;
  SearchFlags bench_flags;
  int bench_jobs = 1;
  bench->add_option("suite", bench_dir, "Directory of problem JSON files")->required();
  bench->add_option("--heuristics", bench_heuristics, "Comma-separated heuristic list");
  bench_flags.attach(bench);
  bench->add_option("--csv-out", bench_csv, "Write records to this CSV file");
  bench->add_option("--jobs", bench_jobs, "Concurrent runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return kExitSuccess;
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_problem, solve_heuristic, solve_flags, plan_out);
    if (compile->parsed())
      return cmd_compile(compile_problem, compile_mode, compile_out, compile_stats_flag);
    if (validate->parsed()) return cmd_validate(validate_problem, validate_plan_path);
    if (gen->parsed())
      return cmd_gen(gen_domain, gen_n, gen_lo, gen_hi, gen_kind, gen_step, gen_seed, gen_out);
    if (bench->parsed())
      return cmd_bench(bench_dir, bench_heuristics, bench_flags, bench_csv, bench_jobs);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsolved;
  }
  return kExitUsage;
}

}  // namespace cvp
