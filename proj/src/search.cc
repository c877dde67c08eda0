#include "cvp/search.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace cvp {

namespace {

using Clock = std::chrono::steady_clock;

struct Deadline {
  std::optional<Clock::time_point> at;

  static Deadline from(const SearchConfig& config, Clock::time_point start) {
    Deadline d;
    if (config.timeout) d.at = start + *config.timeout;
    return d;
  }
  bool expired() const { return at && Clock::now() >= *at; }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Resolution of the uniform draw over a continuous interval: values are
// lo + j * (hi - lo) / 2^32 with j uniform over 0..2^32, which keeps
// every sampled valuation an exact rational.
constexpr std::uint64_t kContinuousGrid = 1ull << 32;

Rational draw_value(const ControlVarDecl& decl, Rng& rng) {
  if (decl.kind == DomainKind::Discrete) {
    const std::uint64_t points = grid_points(decl);
    const std::uint64_t k = points == 1 ? 0 : rng.below(points);
    return decl.domain.lo + Rational(static_cast<long long>(k)) * decl.step;
  }
  if (decl.domain.is_point()) return decl.domain.lo;
  const std::uint64_t j = rng.below(kContinuousGrid + 1);
  const Rational width = decl.domain.hi - decl.domain.lo;
  return decl.domain.lo +
         width * Rational(static_cast<long long>(j), static_cast<long long>(kContinuousGrid));
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased for any bound.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

void SearchConfig::validate() const {
  if (samples_per_expansion < 1) throw ConfigInvalid("samples per expansion must be >= 1");
  if (max_rejections < 1) throw ConfigInvalid("max rejections must be >= 1");
  if (max_nodes && *max_nodes == 0) throw ConfigInvalid("node cap must be positive");
}

const char* status_str(SearchStatus s) {
  switch (s) {
    case SearchStatus::Solved: return "solved";
    case SearchStatus::Exhausted: return "exhausted";
    case SearchStatus::Timeout: return "timeout";
    case SearchStatus::NodeCapReached: return "node_cap";
  }
  return "?";
}

std::uint64_t grid_points(const ControlVarDecl& decl) {
  if (decl.kind != DomainKind::Discrete)
    throw GridInfeasible("control variable " + decl.name + " is continuous");
  const Rational count = (decl.domain.hi - decl.domain.lo) / decl.step;
  return static_cast<std::uint64_t>(count.to_int64()) + 1;
}

double rectify(double h, std::uint64_t n) { return h + std::log1p(static_cast<double>(n)); }

namespace {

struct SampleOutcome {
  std::optional<ControlValuation> mu;
  std::uint64_t draws = 0;
  std::vector<ControlValuation> attempts;  // filled only when recording
};

SampleOutcome sample_control_detail(const Action& action, const State& state,
                                    const ControlProblem& problem, Rng& rng, int max_rejections,
                                    bool record_attempts) {
  SampleOutcome out;
  if (action.ctrl_vars.empty()) {
    // Parameter-free: every retry would test the identical valuation.
    out.draws = 1;
    ControlValuation mu;
    if (record_attempts) out.attempts.push_back(mu);
    if (applicable(state, action, mu)) out.mu = std::move(mu);
    return out;
  }
  for (int attempt = 0; attempt < max_rejections; ++attempt) {
    ControlValuation mu;
    for (ControlId id : action.ctrl_vars)
      mu.emplace(id, draw_value(problem.control_vars[static_cast<std::size_t>(id)], rng));
    ++out.draws;
    if (record_attempts) out.attempts.push_back(mu);
    if (applicable(state, action, mu)) {
      out.mu = std::move(mu);
      return out;
    }
  }
  return out;
}

}  // namespace

std::optional<ControlValuation> sample_control(const Action& action, const State& state,
                                               const ControlProblem& problem, Rng& rng,
                                               int max_rejections) {
  return sample_control_detail(action, state, problem, rng, max_rejections, false).mu;
}

std::optional<SuccessorSample> phi_sample_successor(const State& state,
                                                    const ControlProblem& problem, Rng& rng,
                                                    const SearchConfig& config) {
  std::vector<int> order(problem.actions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  for (int ai : order) {
    const Action& action = problem.actions[static_cast<std::size_t>(ai)];
    auto outcome = sample_control_detail(action, state, problem, rng, config.max_rejections, false);
    if (outcome.mu) {
      SuccessorSample sample;
      sample.action = ai;
      sample.mu = *outcome.mu;
      sample.next = apply(state, action, sample.mu);
      return sample;
    }
  }
  return std::nullopt;
}

namespace {

/// Mixed-radix index of a discrete valuation within an action's grid,
/// used as the key for tracking which grounded successors a node has
/// already resolved.
struct ActionGrid {
  std::vector<ControlId> vars;
  std::vector<std::uint64_t> sizes;
  std::uint64_t total = 1;

  static std::optional<ActionGrid> of(const Action& a, const ControlProblem& problem,
                                      std::uint64_t cap) {
    ActionGrid g;
    g.vars = a.ctrl_vars;
    for (ControlId id : g.vars) {
      const auto& decl = problem.control_vars[static_cast<std::size_t>(id)];
      if (decl.kind != DomainKind::Discrete) return std::nullopt;
      const std::uint64_t points = grid_points(decl);
      if (points == 0 || g.total > cap / points) return std::nullopt;  // too large to track
      g.sizes.push_back(points);
      g.total *= points;
    }
    return g;
  }

  std::uint64_t index_of(const ControlValuation& mu, const ControlProblem& problem) const {
    std::uint64_t idx = 0;
    std::uint64_t radix = 1;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const auto& decl = problem.control_vars[static_cast<std::size_t>(vars[j])];
      const Rational offset = (mu.at(vars[j]) - decl.domain.lo) / decl.step;
      idx += radix * static_cast<std::uint64_t>(offset.to_int64());
      radix *= sizes[j];
    }
    return idx;
  }

  /// Valuation for a given mixed-radix index.
  ControlValuation valuation_at(std::uint64_t idx, const ControlProblem& problem) const {
    ControlValuation mu;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const auto& decl = problem.control_vars[static_cast<std::size_t>(vars[j])];
      const std::uint64_t k = idx % sizes[j];
      idx /= sizes[j];
      mu.emplace(vars[j], decl.domain.lo + Rational(static_cast<long long>(k)) * decl.step);
    }
    return mu;
  }
};

struct Node {
  State state;
  int parent = -1;
  int edge_action = -1;
  ControlValuation edge_mu;
  std::uint64_t partial = 0;  // partial expansions performed so far
  HeuristicValue h;
  double h_d = 0.0;
  // Grounded (action, valuation) pairs this node has observed, kept only
  // on all-discrete problems; when it covers the whole grid the node is
  // fully expanded and retires instead of being reinserted.
  std::unique_ptr<std::unordered_set<std::uint64_t>> resolved;
};

struct OpenEntry {
  double f;
  std::uint64_t seq;
  int node;
};

Plan reconstruct(const std::deque<Node>& nodes, int leaf, const ControlProblem& problem) {
  std::vector<const Node*> chain;
  for (int at = leaf; nodes[static_cast<std::size_t>(at)].parent >= 0;
       at = nodes[static_cast<std::size_t>(at)].parent)
    chain.push_back(&nodes[static_cast<std::size_t>(at)]);
  std::reverse(chain.begin(), chain.end());
  Plan plan;
  for (const Node* n : chain) {
    Plan::Step step;
    step.action = problem.actions[static_cast<std::size_t>(n->edge_action)].name;
    for (const auto& [id, value] : n->edge_mu)
      step.mu.emplace(problem.control_vars[static_cast<std::size_t>(id)].name, value);
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

}  // namespace

SearchResult dpex(const ControlProblem& problem, const Heuristic& heuristic,
                  const SearchConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const Deadline deadline = Deadline::from(config, start);
  Rng rng(config.seed);

  SearchResult result;
  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.stats.wall_time_seconds = seconds_since(start);
    return result;
  };

  // Full-expansion tracking is possible only when every control variable
  // is discrete and the per-action grids are small enough to index.
  std::vector<ActionGrid> grids;
  std::uint64_t total_pairs = 0;
  bool tracking = true;
  for (const auto& a : problem.actions) {
    auto grid = ActionGrid::of(a, problem, 1ull << 40);
    if (!grid) {
      tracking = false;
      break;
    }
    total_pairs += grid->total;
    grids.push_back(std::move(*grid));
  }
  if (problem.actions.empty()) tracking = false;

  // A deque keeps node references stable while successors are appended.
  std::deque<Node> nodes;
  std::unordered_map<State, int, StateHash> seen;
  auto cmp = [&nodes](const OpenEntry& a, const OpenEntry& b) {
    if (a.f != b.f) return a.f > b.f;
    const auto& ha = nodes[static_cast<std::size_t>(a.node)].h;
    const auto& hb = nodes[static_cast<std::size_t>(b.node)].h;
    if (!(ha == hb)) return hb < ha;
    return a.seq > b.seq;  // FIFO on full ties
  };
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, decltype(cmp)> open(cmp);
  std::uint64_t next_seq = 0;

  const HeuristicValue h0 = heuristic.evaluate(problem.init);
  result.stats.h_at_init = h0;
  if (h0.is_infinite()) {
    result.stats.dead_ends_pruned = 1;
    return finish(SearchStatus::Exhausted);
  }
  {
    Node root;
    root.state = problem.init;
    root.h = h0;
    root.h_d = h0.to_double();
    nodes.push_back(std::move(root));
    seen.emplace(problem.init, 0);
    open.push({nodes[0].h_d, next_seq++, 0});
  }

  while (!open.empty()) {
    if (deadline.expired()) return finish(SearchStatus::Timeout);
    const OpenEntry entry = open.top();
    open.pop();
    const int ni = entry.node;
    Node& node = nodes[static_cast<std::size_t>(ni)];

    if (holds_goal(node.state, problem.goal)) {
      Plan plan = reconstruct(nodes, ni, problem);
      const auto report = validate_plan(problem, plan);
      if (!report.solution)
        throw std::logic_error("dpex produced a plan that fails validation: " + report.message);
      result.stats.plan_length = plan.steps.size();
      result.plan = std::move(plan);
      return finish(SearchStatus::Solved);
    }

    if (node.partial == 0) ++result.stats.expansions;
    ++result.stats.partial_expansions;

    if (tracking && !node.resolved)
      node.resolved = std::make_unique<std::unordered_set<std::uint64_t>>();

    for (int k = 0; k < config.samples_per_expansion; ++k) {
      // One phi draw: shuffled action order, first success wins.
      std::vector<int> order(problem.actions.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

      std::optional<SuccessorSample> sample;
      for (int ai : order) {
        const Action& action = problem.actions[static_cast<std::size_t>(ai)];
        auto outcome =
            sample_control_detail(action, node.state, problem, rng, config.max_rejections, tracking);
        result.stats.samples_drawn += outcome.draws;
        result.stats.samples_rejected += outcome.draws - (outcome.mu ? 1 : 0);
        if (tracking) {
          const auto& grid = grids[static_cast<std::size_t>(ai)];
          for (const auto& mu : outcome.attempts)
            node.resolved->insert((static_cast<std::uint64_t>(ai) << 42) | grid.index_of(mu, problem));
        }
        if (outcome.mu) {
          sample.emplace();
          sample->action = ai;
          sample->mu = *outcome.mu;
          sample->next = apply(node.state, action, sample->mu);
          break;
        }
      }
      if (!sample) continue;

      ++result.stats.nodes_generated;
      if (config.duplicate_pruning) {
        auto it = seen.find(sample->next);
        if (it != seen.end()) {
          ++result.stats.duplicates_pruned;
          continue;
        }
      }
      const HeuristicValue h = heuristic.evaluate(sample->next);
      if (h.is_infinite()) {
        ++result.stats.dead_ends_pruned;
        if (config.duplicate_pruning) seen.emplace(sample->next, -1);
        continue;
      }
      Node succ;
      succ.state = sample->next;
      succ.parent = ni;
      succ.edge_action = sample->action;
      succ.edge_mu = std::move(sample->mu);
      succ.h = h;
      succ.h_d = h.to_double();
      const int id = static_cast<int>(nodes.size());
      nodes.push_back(std::move(succ));
      if (config.duplicate_pruning) seen.emplace(nodes.back().state, id);
      open.push({nodes.back().h_d, next_seq++, id});
    }

    const bool fully_expanded = tracking && node.resolved->size() >= total_pairs;
    if (!fully_expanded) {
      node.partial += 1;
      open.push({rectify(node.h_d, node.partial), next_seq++, ni});
    }

    if (config.max_nodes && nodes.size() >= *config.max_nodes)
      return finish(SearchStatus::NodeCapReached);
  }
  return finish(SearchStatus::Exhausted);
}

SearchResult brute_force_discrete(const ControlProblem& problem, const SearchConfig& config) {
  config.validate();
  for (const auto& decl : problem.control_vars)
    if (decl.kind != DomainKind::Discrete)
      throw GridInfeasible("control variable " + decl.name + " is continuous");

  const auto start = Clock::now();
  const Deadline deadline = Deadline::from(config, start);
  SearchResult result;
  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.stats.wall_time_seconds = seconds_since(start);
    return result;
  };

  std::vector<ActionGrid> grids;
  for (const auto& a : problem.actions) {
    auto grid = ActionGrid::of(a, problem, UINT64_MAX / 2);
    if (!grid) throw GridInfeasible("action " + a.name + ": grid too large to enumerate");
    grids.push_back(std::move(*grid));
  }

  std::deque<Node> nodes;
  std::unordered_map<State, int, StateHash> seen;
  std::queue<int> frontier;
  {
    Node root;
    root.state = problem.init;
    nodes.push_back(std::move(root));
    seen.emplace(problem.init, 0);
    frontier.push(0);
  }

  while (!frontier.empty()) {
    if (deadline.expired()) return finish(SearchStatus::Timeout);
    const int ni = frontier.front();
    frontier.pop();

    if (holds_goal(nodes[static_cast<std::size_t>(ni)].state, problem.goal)) {
      Plan plan = reconstruct(nodes, ni, problem);
      result.stats.plan_length = plan.steps.size();
      result.plan = std::move(plan);
      return finish(SearchStatus::Solved);
    }
    ++result.stats.expansions;

    for (std::size_t ai = 0; ai < problem.actions.size(); ++ai) {
      const Action& action = problem.actions[ai];
      const ActionGrid& grid = grids[ai];
      for (std::uint64_t idx = 0; idx < grid.total; ++idx) {
        const ControlValuation mu = grid.valuation_at(idx, problem);
        const State& state = nodes[static_cast<std::size_t>(ni)].state;
        if (!applicable(state, action, mu)) continue;
        State next = apply(state, action, mu);
        ++result.stats.nodes_generated;
        if (seen.count(next)) {
          ++result.stats.duplicates_pruned;
          continue;
        }
        Node succ;
        succ.state = std::move(next);
        succ.parent = ni;
        succ.edge_action = static_cast<int>(ai);
        succ.edge_mu = mu;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(std::move(succ));
        seen.emplace(nodes.back().state, id);
        frontier.push(id);
        if (config.max_nodes && nodes.size() >= *config.max_nodes)
          return finish(SearchStatus::NodeCapReached);
      }
    }
  }
  return finish(SearchStatus::Exhausted);
}

}  // namespace cvp
