#pragma once

#include "densalg/polynomial.hpp"

namespace densalg {

/// Ratio of multivariate polynomials kept in canonical reduced form:
/// gcd(num, den) = 1 and den monic in graded-lex order. Equality of values
/// is therefore structural equality.
class RationalFunction {
 public:
  explicit RationalFunction(int nvars = 0)
      : num_(nvars), den_(Polynomial::constant(nvars, Rational(1))) {}

  RationalFunction(Polynomial num, Polynomial den);

  static RationalFunction constant(int nvars, const Rational& c) {
    return RationalFunction(Polynomial::constant(nvars, c),
                            Polynomial::constant(nvars, Rational(1)));
  }
  static RationalFunction variable(int nvars, int var) {
    return RationalFunction(Polynomial::variable(nvars, var),
                            Polynomial::constant(nvars, Rational(1)));
  }
  static RationalFunction from_poly(Polynomial p) {
    int n = p.nvars();
    return RationalFunction(std::move(p), Polynomial::constant(n, Rational(1)));
  }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  int nvars() const { return num_.nvars(); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  Rational constant_value() const { return num_.constant_value(); }

  RationalFunction operator-() const;
  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator/(const RationalFunction& o) const;
  RationalFunction operator*(const Rational& c) const;
  bool operator==(const RationalFunction& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RationalFunction& o) const { return !(*this == o); }

  RationalFunction inverse() const;
  RationalFunction pow(int e) const;
  RationalFunction derivative(int var) const;

  Rational eval_rational(const std::vector<Rational>& point) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  Polynomial num_, den_;
  void canonicalize();
};

}  // namespace densalg
