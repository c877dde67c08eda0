#include "cvp/bench.h"

#include <atomic>
#include <mutex>
#include <ostream>
#include <thread>

#include "cvp/compile.h"
#include "cvp/heuristics.h"

namespace cvp {

namespace {

BenchRecord run_one(const std::string& instance, const ControlProblem& problem,
                    const std::string& heuristic_name, const SearchConfig& config) {
  BenchRecord rec;
  rec.instance = instance;
  rec.domain = problem.domain_tag.empty() ? "unknown" : problem.domain_tag;
  rec.heuristic = heuristic_name;
  rec.seed = config.seed;
  try {
    const StatsRecord sizes = compile_stats(problem);
    rec.num_actions = sizes.num_actions;
    rec.num_signature_actions = sizes.num_signature_actions;
    rec.num_optimistic_actions = sizes.num_optimistic_actions;

    const auto heuristic = make_heuristic(heuristic_name, problem);
    const SearchResult result = dpex(problem, *heuristic, config);
    rec.status = status_str(result.status);
    rec.wall_time_ms = result.stats.wall_time_seconds * 1000.0;
    rec.expansions = result.stats.expansions;
    rec.partial_expansions = result.stats.partial_expansions;
    rec.plan_length = result.stats.plan_length;
    if (result.stats.h_at_init) rec.h_at_init = result.stats.h_at_init->str();
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.h_at_init = e.what();
    for (auto& c : rec.h_at_init)
      if (c == ',' || c == '\n') c = ';';  // keep the CSV row well-formed
  }
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(
    const std::vector<std::pair<std::string, ControlProblem>>& suite, const BenchConfig& config) {
  struct Task {
    std::size_t instance;
    std::size_t heuristic;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < suite.size(); ++i)
    for (std::size_t h = 0; h < config.heuristics.size(); ++h) tasks.push_back({i, h});

  std::vector<BenchRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      records[t] = run_one(suite[task.instance].first, suite[task.instance].second,
                           config.heuristics[task.heuristic], config.search);
    }
  };

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "instance,domain,heuristic,seed,status,wall_time_ms,expansions,partial_expansions,"
        "plan_length,h_at_init,actions,signature_actions,optimistic_actions\n";
  for (const auto& r : records) {
    os << r.instance << ',' << r.domain << ',' << r.heuristic << ',' << r.seed << ',' << r.status
       << ',' << r.wall_time_ms << ',' << r.expansions << ',' << r.partial_expansions << ','
       << r.plan_length << ',' << r.h_at_init << ',' << r.num_actions << ','
       << r.num_signature_actions << ',' << r.num_optimistic_actions << '\n';
  }
}

std::map<std::string, int> coverage_summary(const std::vector<BenchRecord>& records) {
  std::map<std::string, int> coverage;
  for (const auto& r : records) {
    coverage.try_emplace(r.heuristic, 0);
    if (r.status == "solved") ++coverage[r.heuristic];
  }
  return coverage;
}

}  // namespace cvp
