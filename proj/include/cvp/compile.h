#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cvp/model.h"

namespace cvp {

/// Control-free numeric atom of a compiled task: lhs op bound, lhs linear
/// over X with no constant part.
struct SimpleCondition {
  LinExprX lhs;
  CmpOp op = CmpOp::GEQ;
  Rational bound;

  friend bool operator==(const SimpleCondition& a, const SimpleCondition& b) {
    return a.op == b.op && a.bound == b.bound && a.lhs == b.lhs;
  }
};

std::string condition_str(const SimpleCondition& c, const std::vector<std::string>& var_names);

/// Action of a simple numeric task: constant additive numeric effects and
/// control-free linear preconditions.
struct SimpleAction {
  std::string name;
  int base_action = -1;  // index into the source problem's action list
  std::vector<Literal> pre_b;
  std::vector<SimpleCondition> pre_q;
  std::vector<FluentId> eff_add;
  std::vector<FluentId> eff_del;
  std::vector<std::pair<VarId, Rational>> eff_q;  // base effect order, one entry per variable
  Rational cost = Rational(1);

  Rational effect_on(VarId var) const;
};

struct SimpleGoal {
  std::vector<Literal> props;
  std::vector<SimpleCondition> nums;
};

struct SimpleProblem {
  std::string name;
  std::string domain_tag;
  std::vector<std::string> fluents;
  std::vector<std::string> state_vars;
  std::vector<SimpleAction> actions;
  State init;
  SimpleGoal goal;
};

bool holds(const State& s, const SimpleCondition& cond);
bool simple_applicable(const State& s, const SimpleAction& a);
State simple_apply(const State& s, const SimpleAction& a);
bool holds_goal(const State& s, const SimpleGoal& goal);

/// Structural checks that a problem really is in the simple numeric
/// fragment (comparators, effect consistency, id ranges). Returns one
/// message per violation; empty means valid.
std::vector<std::string> validate_simple(const SimpleProblem& p);

/// One slot of an action signature: either a concrete endpoint value or
/// "irrelevant" (the condition does not mention this effect's variable).
/// A concrete value of 0 is distinct from irrelevant.
struct SigEntry {
  bool relevant = false;
  Rational value;

  static SigEntry irrelevant() { return SigEntry{}; }
  static SigEntry of(Rational v) { return SigEntry{true, std::move(v)}; }

  friend bool operator==(const SigEntry& a, const SigEntry& b) {
    return a.relevant == b.relevant && (!a.relevant || a.value == b.value);
  }
};

/// Per-effect endpoint choices for one action, aligned with the action's
/// additive numeric effect list.
using Signature = std::vector<SigEntry>;

/// Replaces the control-only right side by the lower bound of its range:
/// (xi_X op xi_U)  becomes  (xi_X op lower(Dom(xi_U))).
SimpleCondition relax_condition(const AtomCondition& cond, const std::vector<Interval>& domains);

/// Exhaustive endpoint compilation: every action is replaced by one
/// variant per combination of effect-range endpoints (effects whose range
/// is a single point contribute exactly one value), all sharing the
/// relaxed preconditions. Throws FragmentViolation if the problem is not
/// controllable simple and CompilationTooLarge past `max_actions`.
SimpleProblem optimistic_compile(const ControlProblem& problem,
                                 std::uint64_t max_actions = 1ull << 20);

/// Endpoint choice of one effect relative to a condition: upper endpoint
/// of the effect range when the condition's coefficient on the effect
/// variable is positive, lower when negative, irrelevant when zero.
SigEntry sign_choice(const SimpleCondition& psi, const NumericEffect& effect,
                     const std::vector<Interval>& domains);

/// All relaxed numeric atoms of the problem (preconditions of every
/// action plus the goal, structurally deduplicated) that mention at least
/// one variable written by `a`'s numeric effects.
std::vector<SimpleCondition> collect_relevant_conditions(const Action& a,
                                                         const ControlProblem& problem,
                                                         const std::vector<Interval>& domains);

/// Merges signatures that are compatible (in every slot at least one side
/// is irrelevant, or both are equal) to a fixpoint, processing a
/// canonical order and merging into the first compatible earlier
/// signature. Remaining irrelevant slots are filled with the lower
/// endpoint of the effect's range, taken from `effect_doms` (aligned with
/// the signature slots).
std::vector<Signature> collapse_signatures(std::vector<Signature> sigs,
                                           const std::vector<Interval>& effect_doms);

/// Reduced endpoint compilation: per action, keep only the collapsed
/// signatures of its relevant conditions. Actions with no relevant
/// condition keep a single all-lower-endpoint variant if they have
/// propositional effects and are dropped otherwise.
SimpleProblem signature_compile(const ControlProblem& problem);

struct StatsRecord {
  std::size_t num_actions = 0;             // |A|
  std::size_t num_signature_actions = 0;   // |A_Sigma|
  std::uint64_t num_optimistic_actions = 0;  // |A_O|, counted without materializing
  std::size_t num_conditions = 0;          // |Psi|, distinct relaxed numeric atoms
};

StatsRecord compile_stats(const ControlProblem& problem);

/// Direct conversion for problems that reference no control variables:
/// every range is a point, so both compilations degenerate to this.
/// Keeps the original action names. Throws FragmentViolation if any
/// action or condition references a control variable.
SimpleProblem to_simple_direct(const ControlProblem& problem);

}  // namespace cvp
