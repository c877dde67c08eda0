#include "cvp/interval.h"

#include <algorithm>

#include "cvp/errors.h"
#include "cvp/model.h"

namespace cvp {

Interval iv_add(const Interval& a, const Interval& b) {
  return Interval(a.lo + b.lo, a.hi + b.hi);
}

Interval iv_sub(const Interval& a, const Interval& b) {
  return Interval(a.lo - b.hi, a.hi - b.lo);
}

Interval iv_mul(const Interval& a, const Interval& b) {
  const Rational p1 = a.lo * b.lo;
  const Rational p2 = a.lo * b.hi;
  const Rational p3 = a.hi * b.lo;
  const Rational p4 = a.hi * b.hi;
  return Interval(min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4)));
}

Interval dom_of(const ControlExpr& expr, const std::vector<Interval>& domains) {
  switch (expr.kind()) {
    case ControlExpr::Kind::Constant:
      return Interval::point(expr.value());
    case ControlExpr::Kind::Var: {
      const auto id = expr.var_id();
      if (id < 0 || static_cast<std::size_t>(id) >= domains.size())
        throw UnboundControlVariable("no domain for control variable id " + std::to_string(id));
      return domains[static_cast<std::size_t>(id)];
    }
    case ControlExpr::Kind::Sum:
      return iv_add(dom_of(*expr.left(), domains), dom_of(*expr.right(), domains));
    case ControlExpr::Kind::Difference:
      return iv_sub(dom_of(*expr.left(), domains), dom_of(*expr.right(), domains));
    case ControlExpr::Kind::Product:
      return iv_mul(dom_of(*expr.left(), domains), dom_of(*expr.right(), domains));
  }
  throw std::logic_error("dom_of: corrupt expression");
}

}  // namespace cvp
