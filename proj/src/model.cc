#include "cvp/model.h"

#include <algorithm>
#include <sstream>

namespace cvp {

void LinExprX::add_term(VarId var, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = coeffs.emplace(var, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs.erase(it);
  }
}

Rational LinExprX::eval(const std::vector<Rational>& nums) const {
  Rational acc = constant;
  for (const auto& [var, c] : coeffs) acc += c * nums.at(static_cast<std::size_t>(var));
  return acc;
}

LinExprX LinExprX::negated() const {
  LinExprX out;
  out.constant = -constant;
  for (const auto& [var, c] : coeffs) out.coeffs.emplace(var, -c);
  return out;
}

ControlExprPtr ControlExpr::make_binary(Kind kind, ControlExprPtr a, ControlExprPtr b) {
  ControlExpr e;
  e.kind_ = kind;
  e.left_ = std::move(a);
  e.right_ = std::move(b);
  return std::make_shared<const ControlExpr>(std::move(e));
}

ControlExprPtr ControlExpr::constant(Rational v) {
  ControlExpr e;
  e.kind_ = Kind::Constant;
  e.value_ = std::move(v);
  return std::make_shared<const ControlExpr>(std::move(e));
}

ControlExprPtr ControlExpr::var(ControlId id) {
  ControlExpr e;
  e.kind_ = Kind::Var;
  e.var_ = id;
  return std::make_shared<const ControlExpr>(std::move(e));
}

ControlExprPtr ControlExpr::sum(ControlExprPtr a, ControlExprPtr b) {
  return make_binary(Kind::Sum, std::move(a), std::move(b));
}

ControlExprPtr ControlExpr::difference(ControlExprPtr a, ControlExprPtr b) {
  return make_binary(Kind::Difference, std::move(a), std::move(b));
}

ControlExprPtr ControlExpr::product(ControlExprPtr a, ControlExprPtr b) {
  return make_binary(Kind::Product, std::move(a), std::move(b));
}

ControlExprPtr ControlExpr::negated(ControlExprPtr e) {
  return difference(constant(Rational(0)), std::move(e));
}

ControlExprPtr ControlExpr::scaled(Rational k, ControlExprPtr e) {
  return product(constant(std::move(k)), std::move(e));
}

bool ControlExpr::references_controls() const {
  switch (kind_) {
    case Kind::Constant: return false;
    case Kind::Var: return true;
    default: return left_->references_controls() || right_->references_controls();
  }
}

void ControlExpr::collect_vars(std::set<ControlId>& out) const {
  switch (kind_) {
    case Kind::Constant: return;
    case Kind::Var: out.insert(var_); return;
    default:
      left_->collect_vars(out);
      right_->collect_vars(out);
  }
}

bool expr_equal(const ControlExpr& a, const ControlExpr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ControlExpr::Kind::Constant: return a.value() == b.value();
    case ControlExpr::Kind::Var: return a.var_id() == b.var_id();
    default:
      return expr_equal(*a.left(), *b.left()) && expr_equal(*a.right(), *b.right());
  }
}

std::string expr_str(const ControlExpr& e, const std::vector<std::string>& control_names) {
  switch (e.kind()) {
    case ControlExpr::Kind::Constant: return e.value().str();
    case ControlExpr::Kind::Var: {
      const auto id = static_cast<std::size_t>(e.var_id());
      return id < control_names.size() ? control_names[id] : "u#" + std::to_string(e.var_id());
    }
    case ControlExpr::Kind::Sum:
      return "(" + expr_str(*e.left(), control_names) + " + " + expr_str(*e.right(), control_names) + ")";
    case ControlExpr::Kind::Difference:
      return "(" + expr_str(*e.left(), control_names) + " - " + expr_str(*e.right(), control_names) + ")";
    case ControlExpr::Kind::Product:
      return "(" + expr_str(*e.left(), control_names) + " * " + expr_str(*e.right(), control_names) + ")";
  }
  return "?";
}

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::GT: return ">";
    case CmpOp::GEQ: return ">=";
    case CmpOp::EQ: return "=";
  }
  return "?";
}

AtomCondition make_condition(LinExprX lhs, RawOp op, ControlExprPtr rhs) {
  AtomCondition cond;
  switch (op) {
    case RawOp::LT:
      cond.op = CmpOp::GT;
      lhs = lhs.negated();
      rhs = ControlExpr::negated(std::move(rhs));
      break;
    case RawOp::LEQ:
      cond.op = CmpOp::GEQ;
      lhs = lhs.negated();
      rhs = ControlExpr::negated(std::move(rhs));
      break;
    case RawOp::GT: cond.op = CmpOp::GT; break;
    case RawOp::GEQ: cond.op = CmpOp::GEQ; break;
    case RawOp::EQ: cond.op = CmpOp::EQ; break;
  }
  if (!lhs.constant.is_zero()) {
    rhs = ControlExpr::difference(std::move(rhs), ControlExpr::constant(lhs.constant));
    lhs.constant = Rational(0);
  }
  cond.lhs = std::move(lhs);
  cond.rhs = std::move(rhs);
  return cond;
}

NumericEffect NumericEffect::additive(VarId var, ControlExprPtr addend) {
  NumericEffect e;
  e.var = var;
  e.lin.add_term(var, Rational(1));
  e.addend = std::move(addend);
  return e;
}

bool NumericEffect::is_additive() const {
  return lin.constant.is_zero() && lin.coeffs.size() == 1 && lin.coeff(var) == Rational(1);
}

std::size_t StateHash::operator()(const State& s) const {
  std::size_t seed = s.props.size() * 0x9e3779b97f4a7c15ULL;
  for (std::size_t i = 0; i < s.props.size(); ++i)
    if (s.props[i]) boost::hash_combine(seed, i);
  for (const auto& v : s.nums) boost::hash_combine(seed, hash_value(v));
  return seed;
}

namespace {

void check_expr_vars(const ControlExpr& e, std::size_t num_controls, const std::string& where) {
  std::set<ControlId> vars;
  e.collect_vars(vars);
  for (ControlId id : vars)
    if (id < 0 || static_cast<std::size_t>(id) >= num_controls)
      throw ModelError("undeclared control variable id " + std::to_string(id) + " in " + where);
}

void check_lin_vars(const LinExprX& lin, std::size_t num_vars, const std::string& where) {
  for (const auto& [var, c] : lin.coeffs) {
    (void)c;
    if (var < 0 || static_cast<std::size_t>(var) >= num_vars)
      throw ModelError("undeclared state variable id " + std::to_string(var) + " in " + where);
  }
}

}  // namespace

void ControlProblem::finalize() {
  const std::size_t nf = fluents.size();
  const std::size_t nx = state_vars.size();
  const std::size_t nu = control_vars.size();

  for (const auto& decl : control_vars) {
    if (decl.domain.hi < decl.domain.lo)
      throw ModelError("control variable " + decl.name + ": empty domain");
    if (decl.kind == DomainKind::Discrete) {
      if (decl.step.sign() <= 0)
        throw ModelError("control variable " + decl.name + ": nonpositive step");
      Rational q = (decl.domain.hi - decl.domain.lo) / decl.step;
      if (!q.is_integer())
        throw ModelError("control variable " + decl.name +
                         ": width is not a multiple of the step");
    }
  }

  if (init.props.size() != nf) init.props.resize(nf, false);
  if (init.nums.size() != nx)
    throw ModelError("initial state must assign every numeric state variable");

  auto check_fluent = [&](FluentId f, const std::string& where) {
    if (f < 0 || static_cast<std::size_t>(f) >= nf)
      throw ModelError("undeclared fluent id " + std::to_string(f) + " in " + where);
  };

  for (auto& a : actions) {
    const std::string where = "action " + a.name;
    if (a.cost.sign() < 0) throw ModelError(where + ": negative cost");
    for (const auto& lit : a.pre_b) check_fluent(lit.fluent, where);
    for (FluentId f : a.eff_add) check_fluent(f, where);
    for (FluentId f : a.eff_del) check_fluent(f, where);
    for (FluentId f : a.eff_add)
      if (std::find(a.eff_del.begin(), a.eff_del.end(), f) != a.eff_del.end())
        throw ModelError(where + ": fluent added and deleted");
    std::set<VarId> touched;
    for (const auto& e : a.eff_q) {
      if (e.var < 0 || static_cast<std::size_t>(e.var) >= nx)
        throw ModelError("undeclared state variable id " + std::to_string(e.var) + " in " + where);
      if (!touched.insert(e.var).second)
        throw ModelError(where + ": two numeric effects on " + state_vars[e.var]);
      check_lin_vars(e.lin, nx, where);
      check_expr_vars(*e.addend, nu, where);
    }
    std::set<ControlId> used;
    for (const auto& cond : a.pre_q) {
      check_lin_vars(cond.lhs, nx, where);
      check_expr_vars(*cond.rhs, nu, where);
      cond.rhs->collect_vars(used);
    }
    for (const auto& e : a.eff_q) e.addend->collect_vars(used);
    a.ctrl_vars.assign(used.begin(), used.end());
  }

  for (const auto& lit : goal.props) check_fluent(lit.fluent, "goal");
  for (const auto& cond : goal.nums) {
    check_lin_vars(cond.lhs, nx, "goal");
    check_expr_vars(*cond.rhs, nu, "goal");
  }
}

std::optional<int> ControlProblem::action_index(const std::string& action_name) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i].name == action_name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<ControlId> ControlProblem::control_index(const std::string& control_name) const {
  for (std::size_t i = 0; i < control_vars.size(); ++i)
    if (control_vars[i].name == control_name) return static_cast<ControlId>(i);
  return std::nullopt;
}

std::vector<Interval> ControlProblem::control_domains() const {
  std::vector<Interval> out;
  out.reserve(control_vars.size());
  for (const auto& decl : control_vars) out.push_back(decl.domain);
  return out;
}

Rational eval_control_expr(const ControlExpr& expr, const ControlValuation& mu) {
  switch (expr.kind()) {
    case ControlExpr::Kind::Constant: return expr.value();
    case ControlExpr::Kind::Var: {
      auto it = mu.find(expr.var_id());
      if (it == mu.end())
        throw UnboundControlVariable("control variable id " + std::to_string(expr.var_id()) +
                                     " not bound by the valuation");
      return it->second;
    }
    case ControlExpr::Kind::Sum:
      return eval_control_expr(*expr.left(), mu) + eval_control_expr(*expr.right(), mu);
    case ControlExpr::Kind::Difference:
      return eval_control_expr(*expr.left(), mu) - eval_control_expr(*expr.right(), mu);
    case ControlExpr::Kind::Product:
      return eval_control_expr(*expr.left(), mu) * eval_control_expr(*expr.right(), mu);
  }
  throw ModelError("corrupt control expression");
}

bool holds(const State& s, const Literal& lit) {
  return s.props.at(static_cast<std::size_t>(lit.fluent)) == lit.value;
}

bool holds(const State& s, const AtomCondition& cond, const ControlValuation& mu) {
  const Rational lhs = cond.lhs.eval(s.nums);
  const Rational rhs = eval_control_expr(*cond.rhs, mu);
  switch (cond.op) {
    case CmpOp::GT: return lhs > rhs;
    case CmpOp::GEQ: return lhs >= rhs;
    case CmpOp::EQ: return lhs == rhs;
  }
  return false;
}

bool holds_goal(const State& s, const Goal& goal) {
  static const ControlValuation empty;
  for (const auto& lit : goal.props)
    if (!holds(s, lit)) return false;
  for (const auto& cond : goal.nums)
    if (!holds(s, cond, empty)) return false;
  return true;
}

bool applicable(const State& s, const Action& a, const ControlValuation& mu) {
  for (const auto& lit : a.pre_b)
    if (!holds(s, lit)) return false;
  for (const auto& cond : a.pre_q)
    if (!holds(s, cond, mu)) return false;
  return true;
}

State apply(const State& s, const Action& a, const ControlValuation& mu) {
  if (!applicable(s, a, mu)) throw NotApplicable("action " + a.name + " is not applicable");
  State next = s;
  for (FluentId f : a.eff_del) next.props[static_cast<std::size_t>(f)] = false;
  for (FluentId f : a.eff_add) next.props[static_cast<std::size_t>(f)] = true;
  // Simultaneous assignment: right-hand sides read the pre-state.
  for (const auto& e : a.eff_q)
    next.nums[static_cast<std::size_t>(e.var)] =
        e.lin.eval(s.nums) + eval_control_expr(*e.addend, mu);
  return next;
}

namespace {

/// Resolves a plan step's by-name valuation against the declarations.
/// Returns a failure message, or fills `out` on success.
std::optional<std::string> resolve_valuation(const ControlProblem& problem, const Action& action,
                                             const std::map<std::string, Rational>& mu_by_name,
                                             ControlValuation& out,
                                             ValidationReport::Reason& reason) {
  for (const auto& [uname, value] : mu_by_name) {
    auto id = problem.control_index(uname);
    if (!id) {
      reason = ValidationReport::Reason::UnboundControlVariable;
      return "valuation binds undeclared control variable " + uname;
    }
    out.emplace(*id, value);
  }
  // Exactly the control variables of this action, each inside its domain.
  for (ControlId id : action.ctrl_vars) {
    auto it = out.find(id);
    const auto& decl = problem.control_vars[static_cast<std::size_t>(id)];
    if (it == out.end()) {
      reason = ValidationReport::Reason::UnboundControlVariable;
      return "valuation misses control variable " + decl.name;
    }
    if (!decl.domain.contains(it->second)) {
      reason = ValidationReport::Reason::DomainViolation;
      return "value " + it->second.str() + " for " + decl.name + " is outside [" +
             decl.domain.lo.str() + ", " + decl.domain.hi.str() + "]";
    }
    if (decl.kind == DomainKind::Discrete) {
      Rational q = (it->second - decl.domain.lo) / decl.step;
      if (!q.is_integer()) {
        reason = ValidationReport::Reason::DomainViolation;
        return "value " + it->second.str() + " for " + decl.name + " is off the step grid";
      }
    }
  }
  if (out.size() != action.ctrl_vars.size()) {
    reason = ValidationReport::Reason::DomainViolation;
    return "valuation binds control variables not used by action " + action.name;
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate_plan(const ControlProblem& problem, const Plan& plan) {
  ValidationReport report;
  State current = problem.init;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    auto ai = problem.action_index(step.action);
    if (!ai) throw UnknownAction("plan step " + std::to_string(i) + ": unknown action " + step.action);
    const Action& action = problem.actions[static_cast<std::size_t>(*ai)];

    ControlValuation mu;
    auto failure = resolve_valuation(problem, action, step.mu, mu, report.reason);
    if (failure) {
      report.failing_step = i;
      report.message = *failure;
      report.final_state = current;
      return report;
    }
    if (!applicable(current, action, mu)) {
      report.failing_step = i;
      report.reason = ValidationReport::Reason::NotApplicable;
      report.message = "action " + action.name + " is not applicable at step " + std::to_string(i);
      report.final_state = current;
      return report;
    }
    current = apply(current, action, mu);
  }
  report.valid = true;
  report.solution = holds_goal(current, problem.goal);
  if (!report.solution) report.message = "plan is executable but the goal is not satisfied";
  report.final_state = std::move(current);
  return report;
}

std::string Diagnostics::summary() const {
  if (violations.empty()) return "controllable simple";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) {
    switch (v.kind) {
      case Violation::Kind::NonAdditiveEffect: os << " [NonAdditiveEffect " << v.where << "]"; break;
      case Violation::Kind::DisallowedComparator: os << " [DisallowedComparator " << v.where << "]"; break;
      case Violation::Kind::ControlInGoal: os << " [ControlInGoal " << v.where << "]"; break;
    }
  }
  return os.str();
}

Diagnostics check_controllable_simple(const ControlProblem& problem) {
  Diagnostics diags;
  using Kind = Diagnostics::Violation::Kind;

  // Variables mentioned by any condition, preconditions and goal alike.
  std::set<VarId> condition_vars;
  auto scan_condition = [&](const AtomCondition& cond, const std::string& where) {
    for (const auto& [var, c] : cond.lhs.coeffs) {
      (void)c;
      condition_vars.insert(var);
    }
    if (cond.op == CmpOp::EQ) diags.violations.push_back({Kind::DisallowedComparator, where});
  };

  for (const auto& a : problem.actions) {
    for (std::size_t i = 0; i < a.pre_q.size(); ++i)
      scan_condition(a.pre_q[i], "precondition " + std::to_string(i) + " of " + a.name);
  }
  for (std::size_t i = 0; i < problem.goal.nums.size(); ++i) {
    const auto& cond = problem.goal.nums[i];
    scan_condition(cond, "goal atom " + std::to_string(i));
    if (cond.rhs->references_controls())
      diags.violations.push_back({Kind::ControlInGoal, "goal atom " + std::to_string(i)});
  }

  for (const auto& a : problem.actions) {
    for (const auto& e : a.eff_q) {
      if (condition_vars.count(e.var) && !e.is_additive())
        diags.violations.push_back(
            {Kind::NonAdditiveEffect,
             "effect on " + problem.state_vars[static_cast<std::size_t>(e.var)] + " of " + a.name});
    }
  }
  return diags;
}

}  // namespace cvp
