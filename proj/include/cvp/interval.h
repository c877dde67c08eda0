#pragma once

#include <stdexcept>
#include <vector>

#include "cvp/rational.h"

namespace cvp {

class ControlExpr;

/// Closed rational interval [lo, hi].
struct Interval {
  Rational lo;
  Rational hi;

  Interval() = default;
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) throw std::invalid_argument("Interval: lo > hi");
  }

  static Interval point(Rational v) { return Interval(v, v); }

  bool is_point() const { return lo == hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

Interval iv_add(const Interval& a, const Interval& b);
Interval iv_sub(const Interval& a, const Interval& b);
Interval iv_mul(const Interval& a, const Interval& b);

/// Range of a control expression under the given per-variable domains,
/// by structural interval evaluation. Repeated variable occurrences are
/// treated independently, so the result over-approximates in that case.
///
/// `domains` is indexed by control-variable id; an out-of-range variable
/// throws UnboundControlVariable.
Interval dom_of(const ControlExpr& expr, const std::vector<Interval>& domains);

}  // namespace cvp
