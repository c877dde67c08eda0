#pragma once

#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace cvp {

/// Exact rational value. Everything the planner computes with thresholds
/// (states, bounds, heuristic values) stays in this type; doubles appear
/// only in search f-values where a logarithm is added.
///
/// The value is kept reduced with a positive denominator.
class Rational {
 public:
  using BigInt = boost::multiprecision::cpp_int;
  using Backend = boost::multiprecision::cpp_rational;

  Rational() : v_(0) {}
  Rational(long long n) : v_(n) {}  // NOLINT: implicit by design
  Rational(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = Backend(BigInt(num)) / Backend(BigInt(den));
  }
  explicit Rational(Backend v) : v_(std::move(v)) {}

  /// Parses "p", "-p" or "p/q". Throws std::invalid_argument on anything else.
  static Rational parse(const std::string& text);

  BigInt numerator() const { return boost::multiprecision::numerator(v_); }
  BigInt denominator() const { return boost::multiprecision::denominator(v_); }

  bool is_zero() const { return v_.is_zero(); }
  bool is_integer() const { return denominator() == 1; }
  int sign() const { return v_.sign(); }

  /// Integral value as int64. Pre: is_integer() and fits.
  long long to_int64() const;

  double to_double() const { return v_.convert_to<double>(); }

  /// "p" when integral, "p/q" otherwise.
  std::string str() const;

  Rational operator-() const { return Rational(Backend(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend std::size_t hash_value(const Rational& r) {
    boost::hash<Backend> h;
    return h(r.v_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  Backend v_;
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

}  // namespace cvp

template <>
struct std::hash<cvp::Rational> {
  std::size_t operator()(const cvp::Rational& r) const { return hash_value(r); }
};
