#include "cvp/heuristics.h"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <queue>

namespace cvp {

Rational net_effect(const SimpleCondition& psi, const SimpleAction& a) {
  Rational acc(0);
  for (const auto& [var, k] : a.eff_q) acc += psi.lhs.coeff(var) * k;
  return acc;
}

Rational repetitions_needed(const State& s, const SimpleCondition& psi, const SimpleAction& a) {
  if (holds(s, psi)) return Rational(0);
  const Rational net = net_effect(psi, a);
  if (net.sign() <= 0)
    throw NoPositiveNetEffect("action " + a.name + " has no positive net effect on the atom");
  return (psi.bound - psi.lhs.eval(s.nums)) / net;
}

int SubgoalingEvaluator::atom_id(const Atom& atom) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& other = atoms_[i];
    if (other.numeric != atom.numeric) continue;
    if (atom.numeric ? other.num == atom.num : other.lit == atom.lit) return static_cast<int>(i);
  }
  return -1;
}

SubgoalingEvaluator::SubgoalingEvaluator(const SimpleProblem& problem) : problem_(&problem) {
  auto intern = [&](Atom atom) {
    int id = atom_id(atom);
    if (id >= 0) return id;
    atoms_.push_back(std::move(atom));
    return static_cast<int>(atoms_.size() - 1);
  };
  auto prop_atom = [&](const Literal& lit) {
    Atom a;
    a.lit = lit;
    return intern(std::move(a));
  };
  auto num_atom = [&](const SimpleCondition& cond) {
    Atom a;
    a.numeric = true;
    a.num = cond;
    return intern(std::move(a));
  };

  const auto& actions = problem.actions;
  action_pre_atoms_.resize(actions.size());
  for (std::size_t ai = 0; ai < actions.size(); ++ai) {
    std::vector<int>& pre = action_pre_atoms_[ai];
    for (const auto& lit : actions[ai].pre_b) pre.push_back(prop_atom(lit));
    for (const auto& cond : actions[ai].pre_q) pre.push_back(num_atom(cond));
    std::sort(pre.begin(), pre.end());
    pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
  }
  for (const auto& lit : problem.goal.props) goal_atoms_.push_back(prop_atom(lit));
  for (const auto& cond : problem.goal.nums) goal_atoms_.push_back(num_atom(cond));
  std::sort(goal_atoms_.begin(), goal_atoms_.end());
  goal_atoms_.erase(std::unique(goal_atoms_.begin(), goal_atoms_.end()), goal_atoms_.end());

  atom_consumers_.resize(atoms_.size());
  for (std::size_t ai = 0; ai < actions.size(); ++ai)
    for (int atom : action_pre_atoms_[ai]) atom_consumers_[static_cast<std::size_t>(atom)].push_back(static_cast<int>(ai));

  action_achieves_prop_.resize(actions.size());
  action_achieves_num_.resize(actions.size());
  for (std::size_t ai = 0; ai < actions.size(); ++ai) {
    const SimpleAction& a = actions[ai];
    for (std::size_t t = 0; t < atoms_.size(); ++t) {
      const Atom& atom = atoms_[t];
      if (atom.numeric) {
        const Rational net = net_effect(atom.num, a);
        if (net.sign() > 0) action_achieves_num_[ai].emplace_back(static_cast<int>(t), net);
      } else {
        const auto& set = atom.lit.value ? a.eff_add : a.eff_del;
        if (std::find(set.begin(), set.end(), atom.lit.fluent) != set.end())
          action_achieves_prop_[ai].push_back(static_cast<int>(t));
      }
    }
  }

  // Canonical achiever preference when candidate costs tie.
  std::vector<int> order(actions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (actions[static_cast<std::size_t>(a)].cost != actions[static_cast<std::size_t>(b)].cost)
      return actions[static_cast<std::size_t>(a)].cost < actions[static_cast<std::size_t>(b)].cost;
    return actions[static_cast<std::size_t>(a)].name < actions[static_cast<std::size_t>(b)].name;
  });
  action_rank_.resize(actions.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    action_rank_[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
}

struct SubgoalingEvaluator::Scratch {
  std::vector<Rational> lhs_cache;            // per atom (numeric ones meaningful)
  std::vector<std::optional<Rational>> best;  // tentative atom costs
  std::vector<char> settled;
  std::vector<int> open_pre;                  // per action, unsettled precondition atoms
  std::vector<Rational> pre_cost;             // per action, sum of settled precondition costs
  std::vector<int> achiever;                  // per atom, -1 when satisfied outright
  std::vector<Rational> demand;               // per atom, repetitions asked of the achiever
  std::priority_queue<std::pair<Rational, int>, std::vector<std::pair<Rational, int>>,
                      std::greater<>>
      queue;
};

bool SubgoalingEvaluator::satisfied(std::size_t t, const State& s,
                                    const std::vector<Rational>& lhs_cache) const {
  const Atom& atom = atoms_[t];
  if (!atom.numeric) return holds(s, atom.lit);
  const Rational& lhs = lhs_cache[t];
  switch (atom.num.op) {
    case CmpOp::GT: return lhs > atom.num.bound;
    case CmpOp::GEQ: return lhs >= atom.num.bound;
    case CmpOp::EQ: return lhs == atom.num.bound;
  }
  return false;
}

void SubgoalingEvaluator::run_fixpoint(const State& s, Scratch& sc) const {
  const auto& actions = problem_->actions;
  const std::size_t n = atoms_.size();
  sc.lhs_cache.assign(n, Rational(0));
  sc.best.assign(n, std::nullopt);
  sc.settled.assign(n, 0);
  sc.achiever.assign(n, -1);
  sc.demand.assign(n, Rational(0));
  sc.pre_cost.assign(actions.size(), Rational(0));
  sc.open_pre.resize(actions.size());

  for (std::size_t t = 0; t < n; ++t)
    if (atoms_[t].numeric) sc.lhs_cache[t] = atoms_[t].num.lhs.eval(s.nums);

  auto try_update = [&](int atom, Rational cand, int action, Rational dem) {
    const auto t = static_cast<std::size_t>(atom);
    if (sc.settled[t]) return;
    if (!sc.best[t] || cand < *sc.best[t]) {
      sc.best[t] = cand;
      sc.achiever[t] = action;
      sc.demand[t] = std::move(dem);
      sc.queue.emplace(*sc.best[t], atom);
    } else if (cand == *sc.best[t] && sc.achiever[t] >= 0 &&
               action_rank_[static_cast<std::size_t>(action)] <
                   action_rank_[static_cast<std::size_t>(sc.achiever[t])]) {
      sc.achiever[t] = action;
      sc.demand[t] = std::move(dem);
    }
  };

  auto relax_through = [&](std::size_t ai) {
    const SimpleAction& a = actions[ai];
    const Rational& pre = sc.pre_cost[ai];
    for (int atom : action_achieves_prop_[ai]) try_update(atom, pre + a.cost, static_cast<int>(ai), Rational(1));
    for (const auto& [atom, net] : action_achieves_num_[ai]) {
      const auto t = static_cast<std::size_t>(atom);
      if (sc.settled[t]) continue;
      if (satisfied(t, s, sc.lhs_cache)) continue;  // handled by initialization
      Rational reps = (atoms_[t].num.bound - sc.lhs_cache[t]) / net;
      try_update(atom, pre + reps * a.cost, static_cast<int>(ai), std::move(reps));
    }
  };

  for (std::size_t t = 0; t < n; ++t) {
    if (satisfied(t, s, sc.lhs_cache)) {
      sc.best[t] = Rational(0);
      sc.queue.emplace(Rational(0), static_cast<int>(t));
    }
  }
  for (std::size_t ai = 0; ai < actions.size(); ++ai) {
    sc.open_pre[ai] = static_cast<int>(action_pre_atoms_[ai].size());
    if (sc.open_pre[ai] == 0) relax_through(ai);
  }

  while (!sc.queue.empty()) {
    auto [cost, atom] = sc.queue.top();
    sc.queue.pop();
    const auto t = static_cast<std::size_t>(atom);
    if (sc.settled[t]) continue;
    sc.settled[t] = 1;
    for (int ai : atom_consumers_[t]) {
      const auto i = static_cast<std::size_t>(ai);
      sc.pre_cost[i] += cost;
      if (--sc.open_pre[i] == 0) relax_through(i);
    }
  }
}

HeuristicValue SubgoalingEvaluator::h_add(const State& s) const {
  Scratch sc;
  run_fixpoint(s, sc);
  Rational total(0);
  for (int atom : goal_atoms_) {
    const auto t = static_cast<std::size_t>(atom);
    if (!sc.settled[t]) return HeuristicValue::infinity();
    total += *sc.best[t];
  }
  return HeuristicValue::of(std::move(total));
}

HeuristicValue SubgoalingEvaluator::h_mrp(const State& s) const {
  Scratch sc;
  run_fixpoint(s, sc);
  for (int atom : goal_atoms_)
    if (!sc.settled[static_cast<std::size_t>(atom)]) return HeuristicValue::infinity();

  // Walk best-achiever links backwards from the goal atoms, keeping the
  // maximum repetition demand per action.
  std::vector<char> visited(atoms_.size(), 0);
  std::vector<std::optional<Rational>> required(problem_->actions.size());
  std::vector<int> worklist(goal_atoms_.begin(), goal_atoms_.end());
  while (!worklist.empty()) {
    const int atom = worklist.back();
    worklist.pop_back();
    const auto t = static_cast<std::size_t>(atom);
    if (visited[t]) continue;
    visited[t] = 1;
    const int ai = sc.achiever[t];
    if (ai < 0) continue;  // satisfied in s, nothing to extract
    const auto i = static_cast<std::size_t>(ai);
    if (!required[i] || *required[i] < sc.demand[t]) required[i] = sc.demand[t];
    for (int pre : action_pre_atoms_[i]) worklist.push_back(pre);
  }

  Rational total(0);
  for (std::size_t i = 0; i < required.size(); ++i)
    if (required[i]) total += problem_->actions[i].cost * *required[i];
  return HeuristicValue::of(std::move(total));
}

HeuristicValue h_add(const State& s, const SimpleProblem& problem) {
  return SubgoalingEvaluator(problem).h_add(s);
}

HeuristicValue h_mrp(const State& s, const SimpleProblem& problem) {
  return SubgoalingEvaluator(problem).h_mrp(s);
}

HeuristicValue h_zero(const State&) { return HeuristicValue::of(Rational(0)); }

HeuristicValue h_mgc(const State& s, const ControlProblem& problem) {
  static const ControlValuation empty;
  Rational total(0);
  for (const auto& lit : problem.goal.props)
    if (!holds(s, lit)) total += Rational(1);
  for (const auto& cond : problem.goal.nums) {
    if (holds(s, cond, empty)) continue;
    const Rational slack = eval_control_expr(*cond.rhs, empty) - cond.lhs.eval(s.nums);
    if (cond.op == CmpOp::EQ)
      total += abs(slack);
    else
      total += max(slack, Rational(0));
  }
  return HeuristicValue::of(std::move(total));
}

bool is_dead_end(const State& s, const SubgoalingEvaluator& sigma_eval) {
  return sigma_eval.h_add(s).is_infinite();
}

namespace {

class ZeroHeuristic final : public Heuristic {
 public:
  ZeroHeuristic() : name_("h0") {}
  HeuristicValue evaluate(const State& s) const override { return h_zero(s); }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
};

class MgcHeuristic final : public Heuristic {
 public:
  explicit MgcHeuristic(const ControlProblem& problem) : name_("hmgc") {
    problem_.goal = problem.goal;
    problem_.fluents = problem.fluents;
    problem_.state_vars = problem.state_vars;
  }
  HeuristicValue evaluate(const State& s) const override { return h_mgc(s, problem_); }
  const std::string& name() const override { return name_; }

 private:
  ControlProblem problem_;  // goal and declarations only
  std::string name_;
};

class SubgoalingHeuristic final : public Heuristic {
 public:
  SubgoalingHeuristic(const ControlProblem& problem, bool merge)
      : compiled_(std::make_shared<SimpleProblem>(signature_compile(problem))),
        eval_(*compiled_),
        merge_(merge),
        name_(merge ? "hmrp" : "hadd") {}

  HeuristicValue evaluate(const State& s) const override {
    return merge_ ? eval_.h_mrp(s) : eval_.h_add(s);
  }
  const std::string& name() const override { return name_; }

 private:
  std::shared_ptr<SimpleProblem> compiled_;
  SubgoalingEvaluator eval_;
  bool merge_;
  std::string name_;
};

}  // namespace

std::unique_ptr<Heuristic> make_heuristic(const std::string& name, const ControlProblem& problem) {
  if (name == "h0") return std::make_unique<ZeroHeuristic>();
  if (name == "hmgc") return std::make_unique<MgcHeuristic>(problem);
  if (name == "hadd") return std::make_unique<SubgoalingHeuristic>(problem, false);
  if (name == "hmrp") return std::make_unique<SubgoalingHeuristic>(problem, true);
  throw ConfigInvalid("unknown heuristic '" + name + "' (expected h0, hmgc, hadd or hmrp)");
}

}  // namespace cvp
