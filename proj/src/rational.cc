#include "cvp/rational.h"

#include <cctype>
#include <ostream>

namespace cvp {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_integer_token(text))
      throw std::invalid_argument("Rational: cannot parse '" + text + "'");
    return Rational(Backend(BigInt(text)));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!is_integer_token(num) || !is_integer_token(den))
    throw std::invalid_argument("Rational: cannot parse '" + text + "'");
  BigInt d(den);
  if (d == 0) throw std::invalid_argument("Rational: zero denominator in '" + text + "'");
  return Rational(Backend(BigInt(num)) / Backend(d));
}

long long Rational::to_int64() const {
  if (!is_integer()) throw std::domain_error("Rational: " + str() + " is not integral");
  return numerator().convert_to<long long>();
}

std::string Rational::str() const {
  std::string s = numerator().str();
  if (!is_integer()) {
    s += '/';
    s += denominator().str();
  }
  return s;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace cvp
