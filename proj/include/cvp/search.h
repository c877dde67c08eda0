#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "cvp/heuristics.h"
#include "cvp/model.h"

namespace cvp {

/// Deterministic random source for everything the search draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, bound), unbiased. Pre: bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

struct SearchConfig {
  int samples_per_expansion = 5;  // successors drawn per partial expansion
  std::uint64_t seed = 1;
  int max_rejections = 100;  // per sample_control call
  std::optional<std::chrono::milliseconds> timeout;
  std::optional<std::uint64_t> max_nodes;
  bool duplicate_pruning = true;

  void validate() const;  // throws ConfigInvalid
};

enum class SearchStatus { Solved, Exhausted, Timeout, NodeCapReached };

const char* status_str(SearchStatus s);

struct SearchStats {
  std::uint64_t expansions = 0;          // distinct nodes expanded at least once
  std::uint64_t partial_expansions = 0;  // sampling rounds performed
  std::uint64_t samples_drawn = 0;
  std::uint64_t samples_rejected = 0;
  std::uint64_t nodes_generated = 0;
  std::uint64_t duplicates_pruned = 0;
  std::uint64_t dead_ends_pruned = 0;
  double wall_time_seconds = 0.0;
  std::size_t plan_length = 0;
  std::optional<HeuristicValue> h_at_init;
};

struct SearchResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<Plan> plan;
  SearchStats stats;
};

/// Number of grid points of a discrete control variable's domain.
std::uint64_t grid_points(const ControlVarDecl& decl);

/// Rectified priority of a node that has been partially expanded n times.
double rectify(double h, std::uint64_t n);

/// Draws control valuations uniformly over the domain hypercube of the
/// action's control variables (discrete variables over their step grid,
/// continuous ones over a fixed dyadic grid fine enough to be uniform for
/// practical purposes) until one satisfies the precondition, up to
/// max_rejections attempts.
std::optional<ControlValuation> sample_control(const Action& action, const State& state,
                                               const ControlProblem& problem, Rng& rng,
                                               int max_rejections = 100);

struct SuccessorSample {
  int action = -1;
  ControlValuation mu;
  State next;
};

/// One successor draw: actions are tried in a uniformly shuffled order,
/// each with its own rejection budget; the first action for which
/// sampling succeeds is applied. Empty when every action exhausts its
/// budget.
std::optional<SuccessorSample> phi_sample_successor(const State& state,
                                                    const ControlProblem& problem, Rng& rng,
                                                    const SearchConfig& config);

/// Best-first search with delayed partial expansions: the node with the
/// lowest f = h + log(1 + n) is goal-tested and partially expanded by
/// sampling successors; unless it is fully expanded it is reinserted with
/// its rectified value. States whose heuristic is infinite are pruned.
SearchResult dpex(const ControlProblem& problem, const Heuristic& heuristic,
                  const SearchConfig& config);

/// Exhaustive breadth-first baseline over the full grounded successor
/// relation. Requires every control variable to be discrete (throws
/// GridInfeasible otherwise); complete on finite reachable spaces, used
/// as the solvability oracle in tests.
SearchResult brute_force_discrete(const ControlProblem& problem, const SearchConfig& config);

}  // namespace cvp
