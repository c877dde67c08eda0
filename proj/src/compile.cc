#include "cvp/compile.h"

#include <algorithm>
#include <sstream>

namespace cvp {

namespace {

/// Additive numeric effects of an action in declaration order. Effects in
/// general assignment form are excluded: the fragment check guarantees
/// their variables occur in no condition, so no compiled condition or net
/// effect can depend on them.
std::vector<const NumericEffect*> additive_effects(const Action& a) {
  std::vector<const NumericEffect*> out;
  for (const auto& e : a.eff_q)
    if (e.is_additive()) out.push_back(&e);
  return out;
}

void require_fragment(const ControlProblem& problem) {
  Diagnostics diags = check_controllable_simple(problem);
  if (!diags.accepted())
    throw FragmentViolation("problem is not controllable simple: " + diags.summary());
}

std::string lambda_name(const std::string& base, const std::vector<Rational>& lambdas) {
  if (lambdas.empty()) return base;
  std::ostringstream os;
  os << base << "_{";
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (i) os << ",";
    os << lambdas[i].str();
  }
  os << "}";
  return os.str();
}

std::vector<SimpleCondition> relax_preconditions(const Action& a,
                                                 const std::vector<Interval>& domains) {
  std::vector<SimpleCondition> out;
  out.reserve(a.pre_q.size());
  for (const auto& cond : a.pre_q) out.push_back(relax_condition(cond, domains));
  return out;
}

SimpleProblem compiled_skeleton(const ControlProblem& problem,
                                const std::vector<Interval>& domains) {
  SimpleProblem out;
  out.name = problem.name;
  out.domain_tag = problem.domain_tag;
  out.fluents = problem.fluents;
  out.state_vars = problem.state_vars;
  out.init = problem.init;
  out.goal.props = problem.goal.props;
  for (const auto& cond : problem.goal.nums)
    out.goal.nums.push_back(relax_condition(cond, domains));  // constant rhs: exact
  return out;
}

SimpleAction make_variant(const Action& a, int base_index, const std::string& name,
                          const std::vector<const NumericEffect*>& effs,
                          const std::vector<Rational>& lambdas,
                          const std::vector<SimpleCondition>& relaxed_pre) {
  SimpleAction sa;
  sa.name = name;
  sa.base_action = base_index;
  sa.pre_b = a.pre_b;
  sa.pre_q = relaxed_pre;
  sa.eff_add = a.eff_add;
  sa.eff_del = a.eff_del;
  for (std::size_t j = 0; j < effs.size(); ++j) sa.eff_q.emplace_back(effs[j]->var, lambdas[j]);
  sa.cost = a.cost;
  return sa;
}

/// Total order on signatures used by the collapsing pass: irrelevant
/// sorts before any concrete value, concrete values by magnitude.
bool entry_less(const SigEntry& a, const SigEntry& b) {
  if (a.relevant != b.relevant) return !a.relevant;
  if (!a.relevant) return false;
  return a.value < b.value;
}

bool sig_less(const Signature& a, const Signature& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (entry_less(a[i], b[i])) return true;
    if (entry_less(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

bool mergeable(const Signature& a, const Signature& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].relevant && b[i].relevant && !(a[i].value == b[i].value)) return false;
  }
  return true;
}

Signature merge(const Signature& a, const Signature& b) {
  Signature out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].relevant ? a[i] : b[i];
  return out;
}

}  // namespace

std::string condition_str(const SimpleCondition& c, const std::vector<std::string>& var_names) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, coeff] : c.lhs.coeffs) {
    if (!first) os << " + ";
    first = false;
    if (!(coeff == Rational(1))) os << coeff.str() << "*";
    os << var_names.at(static_cast<std::size_t>(var));
  }
  if (first) os << "0";
  os << " " << cmp_str(c.op) << " " << c.bound.str();
  return os.str();
}

Rational SimpleAction::effect_on(VarId var) const {
  for (const auto& [v, k] : eff_q)
    if (v == var) return k;
  return Rational(0);
}

bool holds(const State& s, const SimpleCondition& cond) {
  const Rational lhs = cond.lhs.eval(s.nums);
  switch (cond.op) {
    case CmpOp::GT: return lhs > cond.bound;
    case CmpOp::GEQ: return lhs >= cond.bound;
    case CmpOp::EQ: return lhs == cond.bound;
  }
  return false;
}

bool simple_applicable(const State& s, const SimpleAction& a) {
  for (const auto& lit : a.pre_b)
    if (!holds(s, lit)) return false;
  for (const auto& cond : a.pre_q)
    if (!holds(s, cond)) return false;
  return true;
}

State simple_apply(const State& s, const SimpleAction& a) {
  State next = s;
  for (FluentId f : a.eff_del) next.props[static_cast<std::size_t>(f)] = false;
  for (FluentId f : a.eff_add) next.props[static_cast<std::size_t>(f)] = true;
  for (const auto& [var, k] : a.eff_q) next.nums[static_cast<std::size_t>(var)] += k;
  return next;
}

bool holds_goal(const State& s, const SimpleGoal& goal) {
  for (const auto& lit : goal.props)
    if (!holds(s, lit)) return false;
  for (const auto& cond : goal.nums)
    if (!holds(s, cond)) return false;
  return true;
}

std::vector<std::string> validate_simple(const SimpleProblem& p) {
  std::vector<std::string> issues;
  const auto nx = p.state_vars.size();
  const auto nf = p.fluents.size();
  auto check_cond = [&](const SimpleCondition& c, const std::string& where) {
    if (c.op == CmpOp::EQ) issues.push_back(where + ": equality comparator");
    if (!c.lhs.constant.is_zero()) issues.push_back(where + ": left side carries a constant");
    for (const auto& [var, coeff] : c.lhs.coeffs) {
      if (coeff.is_zero()) issues.push_back(where + ": stored zero coefficient");
      if (var < 0 || static_cast<std::size_t>(var) >= nx)
        issues.push_back(where + ": undeclared state variable");
    }
  };
  for (const auto& a : p.actions) {
    std::set<VarId> seen;
    for (const auto& [var, k] : a.eff_q) {
      (void)k;
      if (var < 0 || static_cast<std::size_t>(var) >= nx)
        issues.push_back(a.name + ": effect on undeclared variable");
      if (!seen.insert(var).second) issues.push_back(a.name + ": duplicate effect variable");
    }
    for (const auto& lit : a.pre_b)
      if (lit.fluent < 0 || static_cast<std::size_t>(lit.fluent) >= nf)
        issues.push_back(a.name + ": undeclared fluent");
    for (std::size_t i = 0; i < a.pre_q.size(); ++i)
      check_cond(a.pre_q[i], a.name + " precondition " + std::to_string(i));
    if (a.cost.sign() < 0) issues.push_back(a.name + ": negative cost");
  }
  for (std::size_t i = 0; i < p.goal.nums.size(); ++i)
    check_cond(p.goal.nums[i], "goal atom " + std::to_string(i));
  if (p.init.nums.size() != nx) issues.push_back("initial state is not total over X");
  return issues;
}

SimpleCondition relax_condition(const AtomCondition& cond, const std::vector<Interval>& domains) {
  SimpleCondition out;
  out.lhs = cond.lhs;
  out.op = cond.op;
  out.bound = dom_of(*cond.rhs, domains).lo;
  return out;
}

SimpleProblem optimistic_compile(const ControlProblem& problem, std::uint64_t max_actions) {
  require_fragment(problem);
  const auto domains = problem.control_domains();
  SimpleProblem out = compiled_skeleton(problem, domains);

  std::uint64_t total = 0;
  for (std::size_t ai = 0; ai < problem.actions.size(); ++ai) {
    const Action& a = problem.actions[ai];
    const auto effs = additive_effects(a);
    std::vector<Interval> doms;
    doms.reserve(effs.size());
    std::vector<std::size_t> open_slots;  // effects with a non-point range
    for (std::size_t j = 0; j < effs.size(); ++j) {
      doms.push_back(dom_of(*effs[j]->addend, domains));
      if (!doms.back().is_point()) open_slots.push_back(j);
    }
    if (open_slots.size() >= 63) throw CompilationTooLarge("action " + a.name + " alone exceeds the cap");
    const std::uint64_t variants = 1ull << open_slots.size();
    total += variants;
    if (total > max_actions)
      throw CompilationTooLarge("endpoint enumeration exceeds " + std::to_string(max_actions) +
                                " actions");

    const auto relaxed_pre = relax_preconditions(a, domains);
    for (std::uint64_t mask = 0; mask < variants; ++mask) {
      std::vector<Rational> lambdas;
      lambdas.reserve(effs.size());
      for (std::size_t j = 0; j < effs.size(); ++j) lambdas.push_back(doms[j].lo);
      for (std::size_t b = 0; b < open_slots.size(); ++b)
        if (mask & (1ull << b)) lambdas[open_slots[b]] = doms[open_slots[b]].hi;
      out.actions.push_back(make_variant(a, static_cast<int>(ai), lambda_name(a.name, lambdas),
                                         effs, lambdas, relaxed_pre));
    }
  }
  return out;
}

SigEntry sign_choice(const SimpleCondition& psi, const NumericEffect& effect,
                     const std::vector<Interval>& domains) {
  const Rational w = psi.lhs.coeff(effect.var);
  if (w.is_zero()) return SigEntry::irrelevant();
  const Interval dom = dom_of(*effect.addend, domains);
  return SigEntry::of(w.sign() > 0 ? dom.hi : dom.lo);
}

namespace {

/// Relaxed numeric atoms of the whole problem (all preconditions, then
/// the goal), structurally deduplicated, in first-seen order.
std::vector<SimpleCondition> all_relaxed_conditions(const ControlProblem& problem,
                                                    const std::vector<Interval>& domains) {
  std::vector<SimpleCondition> out;
  auto push_unique = [&](SimpleCondition c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  };
  for (const auto& cond : problem.goal.nums) push_unique(relax_condition(cond, domains));
  for (const auto& a : problem.actions)
    for (const auto& cond : a.pre_q) push_unique(relax_condition(cond, domains));
  return out;
}

}  // namespace

std::vector<SimpleCondition> collect_relevant_conditions(const Action& a,
                                                         const ControlProblem& problem,
                                                         const std::vector<Interval>& domains) {
  const auto effs = additive_effects(a);
  std::vector<SimpleCondition> out;
  for (auto& cond : all_relaxed_conditions(problem, domains)) {
    bool touches = false;
    for (const auto* e : effs)
      if (!cond.lhs.coeff(e->var).is_zero()) {
        touches = true;
        break;
      }
    if (touches) out.push_back(std::move(cond));
  }
  return out;
}

std::vector<Signature> collapse_signatures(std::vector<Signature> sigs,
                                           const std::vector<Interval>& effect_doms) {
  // Each pass folds every signature into the first compatible earlier one
  // of a canonically sorted list; repeat until a pass merges nothing.
  while (true) {
    std::sort(sigs.begin(), sigs.end(), sig_less);
    std::vector<Signature> merged;
    for (auto& sig : sigs) {
      bool absorbed = false;
      for (auto& earlier : merged) {
        if (mergeable(earlier, sig)) {
          earlier = merge(earlier, sig);
          absorbed = true;
          break;
        }
      }
      if (!absorbed) merged.push_back(std::move(sig));
    }
    const bool done = merged.size() == sigs.size();
    sigs = std::move(merged);
    if (done) break;
  }
  for (auto& sig : sigs)
    for (std::size_t j = 0; j < sig.size(); ++j)
      if (!sig[j].relevant) sig[j] = SigEntry::of(effect_doms[j].lo);
  return sigs;
}

SimpleProblem signature_compile(const ControlProblem& problem) {
  require_fragment(problem);
  const auto domains = problem.control_domains();
  SimpleProblem out = compiled_skeleton(problem, domains);
  const auto psi_all = all_relaxed_conditions(problem, domains);

  for (std::size_t ai = 0; ai < problem.actions.size(); ++ai) {
    const Action& a = problem.actions[ai];
    const auto effs = additive_effects(a);
    std::vector<Interval> effect_doms;
    effect_doms.reserve(effs.size());
    for (const auto* e : effs) effect_doms.push_back(dom_of(*e->addend, domains));

    std::vector<SimpleCondition> relevant;
    for (const auto& cond : psi_all) {
      bool touches = false;
      for (const auto* e : effs)
        if (!cond.lhs.coeff(e->var).is_zero()) {
          touches = true;
          break;
        }
      if (touches) relevant.push_back(cond);
    }

    const auto relaxed_pre = relax_preconditions(a, domains);
    std::vector<std::vector<Rational>> tuples;
    if (relevant.empty()) {
      if (a.eff_add.empty() && a.eff_del.empty()) continue;  // contributes to nothing
      std::vector<Rational> lambdas;
      for (const auto& dom : effect_doms) lambdas.push_back(dom.lo);
      tuples.push_back(std::move(lambdas));
    } else {
      std::vector<Signature> sigs;
      for (const auto& psi : relevant) {
        Signature sig;
        sig.reserve(effs.size());
        for (const auto* e : effs) sig.push_back(sign_choice(psi, *e, domains));
        if (std::find(sigs.begin(), sigs.end(), sig) == sigs.end()) sigs.push_back(std::move(sig));
      }
      // After collapsing no two signatures are mergeable, so the filled
      // tuples are pairwise distinct.
      for (auto& sig : collapse_signatures(std::move(sigs), effect_doms)) {
        std::vector<Rational> lambdas;
        lambdas.reserve(sig.size());
        for (auto& entry : sig) lambdas.push_back(entry.value);
        tuples.push_back(std::move(lambdas));
      }
    }
    for (const auto& lambdas : tuples)
      out.actions.push_back(make_variant(a, static_cast<int>(ai), lambda_name(a.name, lambdas),
                                         effs, lambdas, relaxed_pre));
  }

  // Size guarantee of the reduced compilation; the max() covers the
  // degenerate case of a problem without numeric conditions, where
  // actions with propositional effects still keep one variant each.
  const std::size_t bound =
      problem.actions.size() * std::max<std::size_t>(psi_all.size(), 1);
  if (out.actions.size() > bound)
    throw std::logic_error("signature compilation exceeded its size bound");
  return out;
}

StatsRecord compile_stats(const ControlProblem& problem) {
  require_fragment(problem);
  const auto domains = problem.control_domains();
  StatsRecord stats;
  stats.num_actions = problem.actions.size();
  stats.num_conditions = all_relaxed_conditions(problem, domains).size();
  stats.num_signature_actions = signature_compile(problem).actions.size();

  std::uint64_t total = 0;
  bool saturated = false;
  for (const auto& a : problem.actions) {
    std::size_t open = 0;
    for (const auto* e : additive_effects(a))
      if (!dom_of(*e->addend, domains).is_point()) ++open;
    if (open >= 63) {
      saturated = true;
      break;
    }
    const std::uint64_t variants = 1ull << open;
    if (total > UINT64_MAX - variants) {
      saturated = true;
      break;
    }
    total += variants;
  }
  stats.num_optimistic_actions = saturated ? UINT64_MAX : total;
  return stats;
}

SimpleProblem to_simple_direct(const ControlProblem& problem) {
  require_fragment(problem);
  for (const auto& a : problem.actions)
    if (!a.ctrl_vars.empty())
      throw FragmentViolation("to_simple_direct: action " + a.name + " uses control variables");
  const auto domains = problem.control_domains();
  SimpleProblem out = compiled_skeleton(problem, domains);
  for (std::size_t ai = 0; ai < problem.actions.size(); ++ai) {
    const Action& a = problem.actions[ai];
    const auto effs = additive_effects(a);
    std::vector<Rational> lambdas;
    for (const auto* e : effs) lambdas.push_back(dom_of(*e->addend, domains).lo);
    out.actions.push_back(make_variant(a, static_cast<int>(ai), a.name, effs, lambdas,
                                       relax_preconditions(a, domains)));
  }
  return out;
}

}  // namespace cvp
