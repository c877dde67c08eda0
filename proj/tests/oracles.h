#pragma once

// Independent reference computations used to freeze expected values.
// These deliberately avoid the library's fixpoint machinery: costs are
// recomputed from scratch by naive sweeps until convergence.

#include <optional>
#include <vector>

#include "cvp/compile.h"
#include "cvp/heuristics.h"

namespace cvp::testing {

/// Additive-estimate reference: value iteration over all atoms, one full
/// sweep at a time, no priority queue, no achiever index.
inline HeuristicValue h_add_by_value_iteration(const State& s, const SimpleProblem& p) {
  struct OAtom {
    bool numeric = false;
    Literal lit;
    SimpleCondition num;
  };
  std::vector<OAtom> atoms;
  auto intern_lit = [&](const Literal& lit) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (!atoms[i].numeric && atoms[i].lit == lit) return i;
    atoms.push_back({false, lit, {}});
    return atoms.size() - 1;
  };
  auto intern_num = [&](const SimpleCondition& c) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i].numeric && atoms[i].num == c) return i;
    atoms.push_back({true, {}, c});
    return atoms.size() - 1;
  };

  std::vector<std::vector<std::size_t>> pre(p.actions.size());
  for (std::size_t ai = 0; ai < p.actions.size(); ++ai) {
    for (const auto& lit : p.actions[ai].pre_b) pre[ai].push_back(intern_lit(lit));
    for (const auto& c : p.actions[ai].pre_q) pre[ai].push_back(intern_num(c));
    std::sort(pre[ai].begin(), pre[ai].end());
    pre[ai].erase(std::unique(pre[ai].begin(), pre[ai].end()), pre[ai].end());
  }
  std::vector<std::size_t> goal;
  for (const auto& lit : p.goal.props) goal.push_back(intern_lit(lit));
  for (const auto& c : p.goal.nums) goal.push_back(intern_num(c));
  std::sort(goal.begin(), goal.end());
  goal.erase(std::unique(goal.begin(), goal.end()), goal.end());

  auto satisfied = [&](const OAtom& atom) {
    return atom.numeric ? holds(s, atom.num) : holds(s, atom.lit);
  };

  std::vector<std::optional<Rational>> cost(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (satisfied(atoms[i])) cost[i] = Rational(0);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t ai = 0; ai < p.actions.size(); ++ai) {
      const SimpleAction& a = p.actions[ai];
      Rational pre_cost(0);
      bool ready = true;
      for (std::size_t atom : pre[ai]) {
        if (!cost[atom]) {
          ready = false;
          break;
        }
        pre_cost += *cost[atom];
      }
      if (!ready) continue;
      for (std::size_t t = 0; t < atoms.size(); ++t) {
        if (satisfied(atoms[t])) continue;
        std::optional<Rational> cand;
        if (atoms[t].numeric) {
          const Rational net = net_effect(atoms[t].num, a);
          if (net.sign() > 0) {
            const Rational reps = (atoms[t].num.bound - atoms[t].num.lhs.eval(s.nums)) / net;
            cand = pre_cost + reps * a.cost;
          }
        } else {
          const auto& set = atoms[t].lit.value ? a.eff_add : a.eff_del;
          if (std::find(set.begin(), set.end(), atoms[t].lit.fluent) != set.end())
            cand = pre_cost + a.cost;
        }
        if (cand && (!cost[t] || *cand < *cost[t])) {
          cost[t] = *cand;
          changed = true;
        }
      }
    }
  }

  Rational total(0);
  for (std::size_t atom : goal) {
    if (!cost[atom]) return HeuristicValue::infinity();
    total += *cost[atom];
  }
  return HeuristicValue::of(total);
}

}  // namespace cvp::testing
