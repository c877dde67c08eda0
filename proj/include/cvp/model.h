#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cvp/errors.h"
#include "cvp/interval.h"
#include "cvp/rational.h"

namespace cvp {

// Identifiers are indices into the declaration tables of a ControlProblem.
using VarId = int;      // numeric state variable
using FluentId = int;   // propositional state variable
using ControlId = int;  // control variable

struct State;

/// Sparse linear expression over numeric state variables:
/// sum of coeff * x plus a constant. Zero coefficients are never stored.
struct LinExprX {
  std::map<VarId, Rational> coeffs;
  Rational constant;

  LinExprX() = default;
  explicit LinExprX(Rational c) : constant(std::move(c)) {}

  /// Adds `c * x` to the expression, folding with an existing term and
  /// dropping the entry if the folded coefficient is zero.
  void add_term(VarId var, const Rational& c);

  Rational coeff(VarId var) const {
    auto it = coeffs.find(var);
    return it == coeffs.end() ? Rational(0) : it->second;
  }

  bool is_constant() const { return coeffs.empty(); }

  Rational eval(const std::vector<Rational>& nums) const;

  LinExprX negated() const;

  friend bool operator==(const LinExprX& a, const LinExprX& b) {
    return a.constant == b.constant && a.coeffs == b.coeffs;
  }
};

class ControlExpr;
using ControlExprPtr = std::shared_ptr<const ControlExpr>;

/// Arithmetic expression over control variables: constants, variable
/// leaves, and the three closed operations +, -, *. Immutable; nodes are
/// shared freely. Division is not part of the language.
class ControlExpr {
 public:
  enum class Kind { Constant, Var, Sum, Difference, Product };

  static ControlExprPtr constant(Rational v);
  static ControlExprPtr var(ControlId id);
  static ControlExprPtr sum(ControlExprPtr a, ControlExprPtr b);
  static ControlExprPtr difference(ControlExprPtr a, ControlExprPtr b);
  static ControlExprPtr product(ControlExprPtr a, ControlExprPtr b);
  /// Canonical negation, represented as 0 - e.
  static ControlExprPtr negated(ControlExprPtr e);
  /// k * e convenience.
  static ControlExprPtr scaled(Rational k, ControlExprPtr e);

  Kind kind() const { return kind_; }
  const Rational& value() const { return value_; }
  ControlId var_id() const { return var_; }
  const ControlExprPtr& left() const { return left_; }
  const ControlExprPtr& right() const { return right_; }

  bool references_controls() const;
  void collect_vars(std::set<ControlId>& out) const;

 private:
  ControlExpr() = default;
  static ControlExprPtr make_binary(Kind kind, ControlExprPtr a, ControlExprPtr b);
  Kind kind_ = Kind::Constant;
  Rational value_;
  ControlId var_ = -1;
  ControlExprPtr left_, right_;
};

bool expr_equal(const ControlExpr& a, const ControlExpr& b);
std::string expr_str(const ControlExpr& e, const std::vector<std::string>& control_names);

/// Comparison operators of normalized conditions. EQ can be represented
/// (it arrives from parsing the "=" comparator) but is rejected by the
/// controllable-simple fragment check; everything downstream of that
/// check only ever sees GT and GEQ.
enum class CmpOp { GT, GEQ, EQ };

/// Comparators accepted at the construction boundary. LT/LEQ are
/// normalized away by make_condition.
enum class RawOp { LT, LEQ, GT, GEQ, EQ };

const char* cmp_str(CmpOp op);

/// Numeric condition in normalized form: linear-in-X left side compared
/// against a control-only right side. The left side carries no constant;
/// constants live on the right.
struct AtomCondition {
  LinExprX lhs;
  CmpOp op = CmpOp::GEQ;
  ControlExprPtr rhs;

  friend bool operator==(const AtomCondition& a, const AtomCondition& b) {
    return a.op == b.op && a.lhs == b.lhs && expr_equal(*a.rhs, *b.rhs);
  }
};

/// Builds a normalized AtomCondition from raw parts:
///  - LT/LEQ flip to GT/GEQ by negating both sides,
///  - a nonzero constant on the left moves to the right.
AtomCondition make_condition(LinExprX lhs, RawOp op, ControlExprPtr rhs);

/// Numeric effect with semantics  var := lin(X) + addend(U).
///
/// The canonical fragment form is additive: lin is exactly 1 * var and
/// the whole effect reads  var += addend. The general form exists so the
/// fragment check has something to reject.
struct NumericEffect {
  VarId var = -1;
  LinExprX lin;
  ControlExprPtr addend;

  static NumericEffect additive(VarId var, ControlExprPtr addend);

  bool is_additive() const;
};

struct Literal {
  FluentId fluent = -1;
  bool value = true;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.fluent == b.fluent && a.value == b.value;
  }
};

struct Action {
  std::string name;
  std::vector<Literal> pre_b;
  std::vector<AtomCondition> pre_q;
  std::vector<FluentId> eff_add;
  std::vector<FluentId> eff_del;
  std::vector<NumericEffect> eff_q;  // at most one per state variable
  Rational cost = Rational(1);

  /// Control variables referenced anywhere in the action, sorted.
  /// Filled by ControlProblem::finalize().
  std::vector<ControlId> ctrl_vars;
};

enum class DomainKind { Continuous, Discrete };

struct ControlVarDecl {
  std::string name;
  Interval domain;
  DomainKind kind = DomainKind::Continuous;
  Rational step = Rational(1);  // discrete kind only; (hi-lo) must be a multiple
};

struct Goal {
  std::vector<Literal> props;
  std::vector<AtomCondition> nums;  // rhs must be control-free
};

struct State {
  std::vector<bool> props;      // indexed by FluentId
  std::vector<Rational> nums;   // indexed by VarId, total over X

  friend bool operator==(const State& a, const State& b) {
    return a.props == b.props && a.nums == b.nums;
  }
};

struct StateHash {
  std::size_t operator()(const State& s) const;
};

/// Per-step instantiation of control variables.
using ControlValuation = std::map<ControlId, Rational>;

struct Plan {
  struct Step {
    std::string action;
    std::map<std::string, Rational> mu;  // by control-variable name
  };
  std::vector<Step> steps;
};

/// Numeric planning problem with control variables:
/// (F, X, U, A, s0, G) plus bounded domains for every control variable.
struct ControlProblem {
  std::string name;
  std::string domain_tag;

  std::vector<std::string> fluents;
  std::vector<std::string> state_vars;
  std::vector<ControlVarDecl> control_vars;
  std::vector<Action> actions;
  State init;
  Goal goal;

  /// Validates declarations (ranges, totality of init, effect
  /// consistency, domain invariants) and computes per-action control
  /// variable lists. Throws ModelError on structural violations.
  void finalize();

  std::optional<int> action_index(const std::string& action_name) const;
  std::optional<ControlId> control_index(const std::string& control_name) const;

  std::vector<Interval> control_domains() const;
};

// ---------------------------------------------------------------------------
// Operations

/// Exact value of a control expression under valuation mu.
/// Throws UnboundControlVariable if a variable leaf is missing from mu.
Rational eval_control_expr(const ControlExpr& expr, const ControlValuation& mu);

bool holds(const State& s, const Literal& lit);
bool holds(const State& s, const AtomCondition& cond, const ControlValuation& mu);
bool holds_goal(const State& s, const Goal& goal);

bool applicable(const State& s, const Action& a, const ControlValuation& mu);

/// Successor state; the input is never mutated.
/// Throws NotApplicable if the precondition check fails.
State apply(const State& s, const Action& a, const ControlValuation& mu);

struct ValidationReport {
  enum class Reason { None, DomainViolation, NotApplicable, UnboundControlVariable };

  bool valid = false;
  bool solution = false;
  std::optional<std::size_t> failing_step;
  Reason reason = Reason::None;
  std::string message;
  State final_state;
};

/// Replays the plan through the transition semantics. Throws
/// UnknownAction when a step names an undeclared action; every other
/// defect is reported, not thrown.
ValidationReport validate_plan(const ControlProblem& problem, const Plan& plan);

struct Diagnostics {
  struct Violation {
    enum class Kind { NonAdditiveEffect, DisallowedComparator, ControlInGoal };
    Kind kind;
    std::string where;
  };
  std::vector<Violation> violations;

  bool accepted() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks membership in the controllable simple fragment: conditions use
/// only > and >=, goal atoms are control-free, and every numeric effect
/// on a variable that occurs in some condition is additive with a
/// control-only addend.
Diagnostics check_controllable_simple(const ControlProblem& problem);

}  // namespace cvp
