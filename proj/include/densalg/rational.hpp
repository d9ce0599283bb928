#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace densalg {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Error type for all domain failures (chart mismatch, singular weight, ...).
/// Mathematical check failures are certificate verdicts, never exceptions.
class Error : public std::runtime_error {
 public:
  enum class Code {
    chart_mismatch,
    unknown_coordinate,
    zero_denominator,
    non_invertible,
    parity_mismatch,
    order_too_high,
    singular_weight,
    degenerate_structure,
    bad_argument,
    parse_error,
    internal_inconsistency,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// The two-argument cpp_rational constructor rejects negative denominators;
/// normalize the sign first.
inline Rational make_rational(Int num, Int den) {
  if (den == 0) throw Error(Error::Code::zero_denominator, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline Rational rational_inverse(const Rational& r) {
  if (r == 0) throw Error(Error::Code::zero_denominator, "inverse of zero");
  return make_rational(denominator(r), numerator(r));
}

inline Rational rational_pow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  if (base == 0) {
    if (e < 0) throw Error(Error::Code::zero_denominator, "0 raised to a negative power");
    return Rational(0);
  }
  Rational b = base;
  long n = e;
  if (n < 0) {
    b = rational_inverse(base);
    n = -n;
  }
  Rational acc(1);
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

inline std::string rational_str(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Accepts "12", "-3/4", "+7/2". Throws on anything else.
inline Rational parse_rational(std::string_view s) {
  try {
    std::string t(s);
    return Rational(t);
  } catch (const std::exception&) {
    throw Error(Error::Code::parse_error, "not a rational: '" + std::string(s) + "'");
  }
}

inline long to_long(const Int& v) { return v.convert_to<long>(); }

}  // namespace densalg
