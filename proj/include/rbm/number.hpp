#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rbm {

/// Exact rational scalar. Arbitrary-precision numerator/denominator,
/// kept canonical by every arithmetic operation.
using Rational = mpq_class;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(static_cast<long>(num), static_cast<long>(den));
  q.canonicalize();
  return q;
}

/// Arithmetic policy used by every number-generic algorithm in the library.
/// The rational specialization compares exactly; the double specialization
/// biases threshold comparisons by `cmp_eps` toward satisfying the inequality.
template <class Num>
struct NumTraits;

template <>
struct NumTraits<Rational> {
  using value_type = Rational;
  static constexpr bool exact = true;

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational fraction(long long p, long long q) { return make_rational(p, q); }
  static Rational from_int(long long v) { return make_rational(v); }

  // Exact threshold comparisons.
  static bool leq(const Rational& a, const Rational& b) { return a <= b; }
  static bool geq(const Rational& a, const Rational& b) { return a >= b; }
  static bool is_zero(const Rational& a) { return sgn(a) == 0; }
  static bool is_positive(const Rational& a) { return sgn(a) > 0; }
  static bool is_negative(const Rational& a) { return sgn(a) < 0; }

  // Pivot-eligibility tests coincide with exact tests in rational mode.
  static bool piv_zero(const Rational& a) { return sgn(a) == 0; }
  static bool piv_positive(const Rational& a) { return sgn(a) > 0; }
  static bool piv_negative(const Rational& a) { return sgn(a) < 0; }

  static double to_double(const Rational& a) { return a.get_d(); }

  static std::string to_string(const Rational& a) {
    std::ostringstream os;
    os << a;
    return os.str();
  }

  /// Accepts "p/q", plain integers, and decimal literals (parsed exactly).
  static Rational parse(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) {
      Rational q;
      if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
      q.canonicalize();
      return q;
    }
    // decimal: digits.digits -> scale by a power of ten
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::string den = "1" + std::string(s.size() - dot - 1, '0');
    Rational q;
    if (q.set_str(digits + "/" + den, 10) != 0)
      throw std::invalid_argument("bad decimal literal: " + s);
    q.canonicalize();
    return q;
  }
};

template <>
struct NumTraits<double> {
  using value_type = double;
  static constexpr bool exact = false;

  // Feasibility tolerance for constraint checks and the comparison bias
  // used by rounding thresholds; pivot eligibility is tighter.
  static constexpr double cmp_eps = 1e-9;
  static constexpr double piv_eps = 1e-12;

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double fraction(long long p, long long q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double from_int(long long v) { return static_cast<double>(v); }

  static bool leq(double a, double b) { return a <= b + cmp_eps; }
  static bool geq(double a, double b) { return a >= b - cmp_eps; }
  static bool is_zero(double a) { return std::fabs(a) <= cmp_eps; }
  static bool is_positive(double a) { return a > cmp_eps; }
  static bool is_negative(double a) { return a < -cmp_eps; }

  static bool piv_zero(double a) { return std::fabs(a) <= piv_eps; }
  static bool piv_positive(double a) { return a > piv_eps; }
  static bool piv_negative(double a) { return a < -piv_eps; }

  static double to_double(double a) { return a; }

  static std::string to_string(double a) {
    std::ostringstream os;
    os.precision(17);
    os << a;
    return os.str();
  }

  static double parse(const std::string& s) {
    size_t pos = 0;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      double p = std::stod(s.substr(0, slash), &pos);
      double q = std::stod(s.substr(slash + 1));
      return p / q;
    }
    double v = std::stod(s, &pos);
    return v;
  }
};

}  // namespace rbm
