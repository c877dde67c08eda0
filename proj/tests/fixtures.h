#pragma once

// Shared problem fixtures for the test suites.

#include "cvp/model.h"

namespace cvp::testing {

/// Two-variable fixture with one action:
///   pre  x > u1, y > u2      u1 in [0,4], u2 in [3,5]
///   eff  x += 2*u1 + u2, y += u1 - 3*u2
///   init x = 0, y = 0        goal x > 20
inline ControlProblem two_var_problem(DomainKind kind = DomainKind::Continuous) {
  ControlProblem p;
  p.name = "two-var";
  p.domain_tag = "fixture";
  p.state_vars = {"x", "y"};
  p.control_vars.push_back({"u1", Interval(Rational(0), Rational(4)), kind, Rational(1)});
  p.control_vars.push_back({"u2", Interval(Rational(3), Rational(5)), kind, Rational(1)});

  Action a;
  a.name = "a";
  {
    LinExprX lhs;
    lhs.add_term(0, Rational(1));
    a.pre_q.push_back(make_condition(std::move(lhs), RawOp::GT, ControlExpr::var(0)));
  }
  {
    LinExprX lhs;
    lhs.add_term(1, Rational(1));
    a.pre_q.push_back(make_condition(std::move(lhs), RawOp::GT, ControlExpr::var(1)));
  }
  a.eff_q.push_back(NumericEffect::additive(
      0, ControlExpr::sum(ControlExpr::scaled(Rational(2), ControlExpr::var(0)),
                          ControlExpr::var(1))));
  a.eff_q.push_back(NumericEffect::additive(
      1, ControlExpr::difference(ControlExpr::var(0),
                                 ControlExpr::scaled(Rational(3), ControlExpr::var(1)))));
  p.actions.push_back(std::move(a));

  p.init.nums = {Rational(0), Rational(0)};
  {
    LinExprX lhs;
    lhs.add_term(0, Rational(1));
    p.goal.nums.push_back(make_condition(std::move(lhs), RawOp::GT, ControlExpr::constant(Rational(20))));
  }
  p.finalize();
  return p;
}

/// Control-free fixture with one action adding 1 to both variables and
/// goals x >= 10 and y >= 10 from the origin.
inline ControlProblem shared_action_problem() {
  ControlProblem p;
  p.name = "shared-action";
  p.domain_tag = "fixture";
  p.state_vars = {"x", "y"};

  Action a;
  a.name = "bump";
  a.eff_q.push_back(NumericEffect::additive(0, ControlExpr::constant(Rational(1))));
  a.eff_q.push_back(NumericEffect::additive(1, ControlExpr::constant(Rational(1))));
  p.actions.push_back(std::move(a));

  p.init.nums = {Rational(0), Rational(0)};
  for (VarId v : {0, 1}) {
    LinExprX lhs;
    lhs.add_term(v, Rational(1));
    p.goal.nums.push_back(
        make_condition(std::move(lhs), RawOp::GEQ, ControlExpr::constant(Rational(10))));
  }
  p.finalize();
  return p;
}

inline LinExprX lin1(VarId var, Rational coeff = Rational(1)) {
  LinExprX lhs;
  lhs.add_term(var, std::move(coeff));
  return lhs;
}

inline State make_state(std::vector<Rational> nums, std::vector<bool> props = {}) {
  State s;
  s.nums = std::move(nums);
  s.props = std::move(props);
  return s;
}

}  // namespace cvp::testing
