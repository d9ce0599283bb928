#include "densalg/ratfun.hpp"

namespace densalg {

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(Error::Code::zero_denominator, "zero denominator");
  canonicalize();
}

void RationalFunction::canonicalize() {
  if (num_.is_zero()) {
    den_ = Polynomial::constant(num_.nvars(), Rational(1));
    return;
  }
  if (!den_.is_one()) {
    Polynomial g = Polynomial::gcd(num_, den_);
    if (!g.is_one()) {
      num_ = Polynomial::divexact(num_, g);
      den_ = Polynomial::divexact(den_, g);
    }
  }
  Rational lc = den_.leading().second;
  if (lc != 1) {
    Rational inv = rational_inverse(lc);
    num_ = num_ * inv;
    den_ = den_ * inv;
  }
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  return RationalFunction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
  return RationalFunction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  return RationalFunction(num_ * o.num_, den_ * o.den_);
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
  if (o.is_zero()) throw Error(Error::Code::zero_denominator, "division by zero");
  return RationalFunction(num_ * o.den_, den_ * o.num_);
}

RationalFunction RationalFunction::operator*(const Rational& c) const {
  Polynomial n = num_ * c;
  return RationalFunction(std::move(n), den_);
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw Error(Error::Code::non_invertible, "inverse of zero");
  return RationalFunction(den_, num_);
}

RationalFunction RationalFunction::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  RationalFunction acc = constant(nvars(), Rational(1));
  for (int i = 0; i < e; ++i) acc = acc * (*this);
  return acc;
}

RationalFunction RationalFunction::derivative(int var) const {
  // quotient rule; canonicalization reduces the den^2
  Polynomial n = num_.derivative(var) * den_ - num_ * den_.derivative(var);
  return RationalFunction(std::move(n), den_ * den_);
}

Rational RationalFunction::eval_rational(const std::vector<Rational>& point) const {
  Rational d = den_.eval_rational(point);
  if (d == 0) throw Error(Error::Code::zero_denominator, "denominator vanishes at point");
  return num_.eval_rational(point) / d;
}

std::string RationalFunction::to_string(const std::vector<std::string>& names) const {
  if (den_.is_one()) return num_.to_string(names);
  std::string n = num_.to_string(names);
  std::string d = den_.to_string(names);
  return "(" + n + ")/(" + d + ")";
}

}  // namespace densalg
