#pragma once

#include <cstdint>

#include "cvp/model.h"

namespace cvp {

/// Counter-chain instances: n counters starting at 0, one increase action
/// per counter with a control variable over [lo, hi], and staircase goal
/// atoms x_{i+1} - x_i >= 1. Throws ConfigInvalid on bad parameters
/// (n >= 2, lo <= hi, hi >= 0 required).
ControlProblem gen_counters(int n, const Rational& lo, const Rational& hi, DomainKind kind,
                            const Rational& step = Rational(1));

/// Size knobs for random fragment instances. Bounds stay small so the
/// exhaustive oracle remains tractable on the generated problems.
struct RandomSpec {
  int max_state_vars = 4;           // at most 6
  int max_actions = 5;              // at most 6
  int max_controls_per_action = 2;  // at most 3
  int max_fluents = 2;
  DomainKind kind = DomainKind::Discrete;
};

/// Random controllable simple instance: sparse linear conditions with
/// > or >= comparators, additive control-only effects, bounded domains,
/// and at least one numeric goal atom. Every output is accepted by
/// check_controllable_simple, and the same (spec, seed) pair always
/// produces the same problem.
ControlProblem gen_random(const RandomSpec& spec, std::uint64_t seed);

}  // namespace cvp
