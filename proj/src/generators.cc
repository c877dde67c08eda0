#include "cvp/generators.h"

#include <algorithm>
#include <random>
#include <string>

#include "cvp/errors.h"

namespace cvp {

ControlProblem gen_counters(int n, const Rational& lo, const Rational& hi, DomainKind kind,
                            const Rational& step) {
  if (n < 2) throw ConfigInvalid("gen_counters: need at least two counters");
  if (hi < lo) throw ConfigInvalid("gen_counters: lo > hi");
  if (hi.sign() < 0) throw ConfigInvalid("gen_counters: hi must be nonnegative");
  if (kind == DomainKind::Discrete) {
    if (step.sign() <= 0) throw ConfigInvalid("gen_counters: step must be positive");
    if (!((hi - lo) / step).is_integer())
      throw ConfigInvalid("gen_counters: width is not a multiple of the step");
  }

  ControlProblem p;
  p.name = "counters-" + std::to_string(n);
  p.domain_tag = "counters";
  for (int i = 1; i <= n; ++i) p.state_vars.push_back("x" + std::to_string(i));
  p.init.nums.assign(static_cast<std::size_t>(n), Rational(0));

  for (int i = 1; i <= n; ++i) {
    ControlVarDecl decl;
    decl.name = "u" + std::to_string(i);
    decl.domain = Interval(lo, hi);
    decl.kind = kind;
    decl.step = step;
    p.control_vars.push_back(std::move(decl));

    Action a;
    a.name = "increase" + std::to_string(i);
    a.eff_q.push_back(NumericEffect::additive(i - 1, ControlExpr::var(i - 1)));
    p.actions.push_back(std::move(a));
  }

  for (int i = 1; i < n; ++i) {
    LinExprX lhs;
    lhs.add_term(i, Rational(1));       // x_{i+1}
    lhs.add_term(i - 1, Rational(-1));  // - x_i
    p.goal.nums.push_back(make_condition(std::move(lhs), RawOp::GEQ, ControlExpr::constant(Rational(1))));
  }

  p.finalize();
  return p;
}

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  // Plain modulo keeps the generator reproducible; the tiny bias is
  // irrelevant for instance generation.
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

ControlProblem gen_random(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ControlProblem p;
  p.name = "random-" + std::to_string(seed);
  p.domain_tag = "random";

  const int nx = uniform_int(rng, 2, std::min(spec.max_state_vars, 6));
  const int na = uniform_int(rng, 2, std::min(spec.max_actions, 6));
  const int nf = spec.max_fluents > 0 ? uniform_int(rng, 0, spec.max_fluents) : 0;

  for (int v = 0; v < nx; ++v) p.state_vars.push_back("x" + std::to_string(v + 1));
  for (int f = 0; f < nf; ++f) p.fluents.push_back("p" + std::to_string(f + 1));
  p.init.nums.assign(static_cast<std::size_t>(nx), Rational(0));
  p.init.props.assign(static_cast<std::size_t>(nf), false);

  for (int ai = 0; ai < na; ++ai) {
    Action a;
    a.name = "act" + std::to_string(ai + 1);

    const int nu = uniform_int(rng, 0, std::min(spec.max_controls_per_action, 3));
    std::vector<ControlId> own;
    for (int j = 0; j < nu; ++j) {
      ControlVarDecl decl;
      decl.name = "u" + std::to_string(ai + 1) + "_" + std::to_string(j + 1);
      const Rational lo(uniform_int(rng, 0, 2));
      const Rational width(uniform_int(rng, 1, 4));
      decl.domain = Interval(lo, lo + width);
      decl.kind = spec.kind;
      decl.step = Rational(1);
      own.push_back(static_cast<ControlId>(p.control_vars.size()));
      p.control_vars.push_back(std::move(decl));
    }

    // Additive effects: constant plus a small linear combination of the
    // action's own control variables.
    const int ne = uniform_int(rng, 1, std::min(nx, 2));
    std::vector<int> vars(static_cast<std::size_t>(nx));
    for (int v = 0; v < nx; ++v) vars[static_cast<std::size_t>(v)] = v;
    for (int j = 0; j < ne; ++j) {
      const int pick = uniform_int(rng, j, nx - 1);
      std::swap(vars[static_cast<std::size_t>(j)], vars[static_cast<std::size_t>(pick)]);
      ControlExprPtr addend = ControlExpr::constant(Rational(uniform_int(rng, -1, 2)));
      for (ControlId u : own) {
        const int coeff = uniform_int(rng, -1, 2);
        if (coeff == 0) continue;
        addend = ControlExpr::sum(
            std::move(addend), ControlExpr::scaled(Rational(coeff), ControlExpr::var(u)));
      }
      a.eff_q.push_back(NumericEffect::additive(vars[static_cast<std::size_t>(j)], std::move(addend)));
    }

    // Occasional numeric precondition with a low bound, sometimes shifted
    // by one of the action's control variables.
    if (uniform_int(rng, 0, 2) == 0) {
      LinExprX lhs;
      lhs.add_term(uniform_int(rng, 0, nx - 1), Rational(uniform_int(rng, 0, 1) ? 1 : -1));
      ControlExprPtr rhs = ControlExpr::constant(Rational(uniform_int(rng, -4, 0)));
      if (!own.empty() && uniform_int(rng, 0, 1) == 0)
        rhs = ControlExpr::difference(std::move(rhs), ControlExpr::var(own.front()));
      a.pre_q.push_back(make_condition(std::move(lhs), uniform_int(rng, 0, 1) ? RawOp::GEQ : RawOp::GT,
                                       std::move(rhs)));
    }

    if (nf > 0) {
      if (uniform_int(rng, 0, 2) == 0)
        a.pre_b.push_back({uniform_int(rng, 0, nf - 1), uniform_int(rng, 0, 3) != 0});
      if (uniform_int(rng, 0, 1) == 0)
        a.eff_add.push_back(uniform_int(rng, 0, nf - 1));
      else if (uniform_int(rng, 0, 2) == 0) {
        const FluentId f = uniform_int(rng, 0, nf - 1);
        if (std::find(a.eff_add.begin(), a.eff_add.end(), f) == a.eff_add.end())
          a.eff_del.push_back(f);
      }
    }
    p.actions.push_back(std::move(a));
  }

  // Always at least one numeric goal atom.
  const int goals = uniform_int(rng, 1, 2);
  for (int g = 0; g < goals; ++g) {
    LinExprX lhs;
    lhs.add_term(uniform_int(rng, 0, nx - 1), Rational(1));
    if (uniform_int(rng, 0, 3) == 0) lhs.add_term(uniform_int(rng, 0, nx - 1), Rational(-1));
    if (lhs.coeffs.empty()) lhs.add_term(0, Rational(1));  // the two terms cancelled
    p.goal.nums.push_back(make_condition(std::move(lhs),
                                         uniform_int(rng, 0, 1) ? RawOp::GEQ : RawOp::GT,
                                         ControlExpr::constant(Rational(uniform_int(rng, 1, 4)))));
  }
  if (nf > 0 && uniform_int(rng, 0, 2) == 0)
    p.goal.props.push_back({uniform_int(rng, 0, nf - 1), true});

  p.finalize();
  return p;
}

}  // namespace cvp
