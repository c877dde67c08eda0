#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cvp/model.h"
#include "cvp/search.h"

namespace cvp {

/// One benchmark run: a (instance, heuristic, seed) triple with its
/// search outcome and the compilation sizes of the instance.
struct BenchRecord {
  std::string instance;
  std::string domain;
  std::string heuristic;
  std::uint64_t seed = 0;
  std::string status;  // solved/exhausted/timeout/node_cap/error
  double wall_time_ms = 0.0;
  std::uint64_t expansions = 0;
  std::uint64_t partial_expansions = 0;
  std::size_t plan_length = 0;
  std::string h_at_init;
  std::size_t num_actions = 0;             // |A|
  std::size_t num_signature_actions = 0;   // |A_Sigma|
  std::uint64_t num_optimistic_actions = 0;  // |A_O|
};

struct BenchConfig {
  SearchConfig search;
  std::vector<std::string> heuristics = {"h0", "hmgc", "hadd", "hmrp"};
  int jobs = 1;
};

/// Runs every (instance, heuristic) pair and returns one record each, in
/// deterministic (instance, heuristic) order regardless of the number of
/// worker threads. A run that throws becomes a status=error row; the
/// suite always completes.
std::vector<BenchRecord> run_benchmark(const std::vector<std::pair<std::string, ControlProblem>>& suite,
                                       const BenchConfig& config);

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);

/// Solved-instance count per heuristic.
std::map<std::string, int> coverage_summary(const std::vector<BenchRecord>& records);

}  // namespace cvp
