#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvp/compile.h"
#include "cvp/model.h"

namespace cvp {

/// Nonnegative rational heuristic estimate, or infinity when some goal
/// atom has no achiever chain from the evaluated state.
class HeuristicValue {
 public:
  HeuristicValue() : finite_(true) {}
  static HeuristicValue infinity() {
    HeuristicValue v;
    v.finite_ = false;
    return v;
  }
  static HeuristicValue of(Rational r) {
    HeuristicValue v;
    v.value_ = std::move(r);
    return v;
  }

  bool is_infinite() const { return !finite_; }
  const Rational& value() const { return value_; }  // pre: finite
  double to_double() const {
    return finite_ ? value_.to_double() : std::numeric_limits<double>::infinity();
  }
  std::string str() const { return finite_ ? value_.str() : "inf"; }

  friend bool operator==(const HeuristicValue& a, const HeuristicValue& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend bool operator<(const HeuristicValue& a, const HeuristicValue& b) {
    if (a.finite_ && b.finite_) return a.value_ < b.value_;
    return a.finite_ && !b.finite_;
  }

 private:
  bool finite_ = true;
  Rational value_;
};

/// Contribution of one action application to a condition's linear
/// expression: sum over effect variables of coefficient * constant addend.
Rational net_effect(const SimpleCondition& psi, const SimpleAction& a);

/// Continuous repetition count needed for `a` to carry `psi` from `s` to
/// its bound: (bound - lhs(s)) / net effect. Zero when psi already holds.
/// Strict atoms use the same closure value as non-strict ones. Throws
/// NoPositiveNetEffect when psi is unsatisfied and the net effect is not
/// positive.
Rational repetitions_needed(const State& s, const SimpleCondition& psi, const SimpleAction& a);

/// Subgoaling fixpoint over a simple numeric task. The condition/achiever
/// index is built once per problem; evaluations allocate only per-call
/// scratch and are safe to run concurrently on different states.
class SubgoalingEvaluator {
 public:
  /// The evaluator keeps a reference: the problem must outlive it.
  explicit SubgoalingEvaluator(const SimpleProblem& problem);
  explicit SubgoalingEvaluator(SimpleProblem&&) = delete;

  /// Additive estimate: sum over goal atoms of least atom costs, where a
  /// satisfied atom costs 0, a propositional atom costs
  /// min over adders of (cost(pre) + lambda), and a numeric atom costs
  /// min over positive-net-effect actions of (m * lambda + cost(pre)),
  /// with cost(pre) summing over all precondition atoms of the achiever.
  HeuristicValue h_add(const State& s) const;

  /// Same fixpoint, but the estimate charges each action once at its
  /// maximum required repetition count along the extracted best-achiever
  /// relaxed plan.
  HeuristicValue h_mrp(const State& s) const;

  const SimpleProblem& problem() const { return *problem_; }

 private:
  struct Atom {
    bool numeric = false;
    Literal lit;          // propositional case
    SimpleCondition num;  // numeric case
  };
  struct NumAchiever {
    int action;
    Rational net;  // positive
  };

  int atom_id(const Atom& atom) const;
  bool satisfied(std::size_t atom, const State& s, const std::vector<Rational>& lhs_cache) const;

  struct Scratch;
  void run_fixpoint(const State& s, Scratch& scratch) const;

  const SimpleProblem* problem_;
  std::vector<Atom> atoms_;
  std::vector<std::vector<int>> action_pre_atoms_;  // deduplicated, per action
  std::vector<std::vector<int>> atom_consumers_;    // atom -> actions listing it as precondition
  // Achiever index: only adders/deleters for propositional atoms, only
  // positive-net-effect actions for numeric atoms. The fixpoint never
  // consults any other action.
  std::vector<std::vector<int>> action_achieves_prop_;
  std::vector<std::vector<std::pair<int, Rational>>> action_achieves_num_;
  std::vector<int> goal_atoms_;
  std::vector<int> action_rank_;  // tie-break order: (cost, name)
};

HeuristicValue h_add(const State& s, const SimpleProblem& problem);
HeuristicValue h_mrp(const State& s, const SimpleProblem& problem);

/// Blind baseline.
HeuristicValue h_zero(const State& s);

/// Manhattan goal-counting baseline on the original problem: linear slack
/// of unsatisfied numeric goal atoms plus the number of unmet
/// propositional goal literals.
HeuristicValue h_mgc(const State& s, const ControlProblem& problem);

/// A state is a dead end when the additive estimate over the reduced
/// compilation diverges; pruning on it is safe for solvable states.
bool is_dead_end(const State& s, const SubgoalingEvaluator& sigma_eval);

/// Heuristic interface used by the search. Implementations are immutable
/// after construction.
class Heuristic {
 public:
  virtual ~Heuristic() = default;
  virtual HeuristicValue evaluate(const State& s) const = 0;
  virtual const std::string& name() const = 0;
};

/// Builds one of {h0, hmgc, hadd, hmrp} for the given problem. hadd and
/// hmrp evaluate over the signature compilation of the problem.
std::unique_ptr<Heuristic> make_heuristic(const std::string& name, const ControlProblem& problem);

}  // namespace cvp
