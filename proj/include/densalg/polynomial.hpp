#pragma once

#include "densalg/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace densalg {

/// Exponent vector over a fixed set of variables, ordered graded-lex
/// (total degree first, then lexicographic on exponents).
class Monomial {
 public:
  explicit Monomial(int nvars) : e_(static_cast<size_t>(nvars), 0) {}

  static Monomial unit(int nvars, int var, int exp = 1) {
    Monomial m(nvars);
    m.e_[static_cast<size_t>(var)] = static_cast<uint16_t>(exp);
    return m;
  }

  int nvars() const { return static_cast<int>(e_.size()); }
  int exp(int var) const { return e_[static_cast<size_t>(var)]; }
  void set_exp(int var, int v) { e_[static_cast<size_t>(var)] = static_cast<uint16_t>(v); }

  int degree() const {
    int d = 0;
    for (auto x : e_) d += x;
    return d;
  }

  bool is_constant() const { return degree() == 0; }

  bool divides(const Monomial& other) const {
    for (size_t i = 0; i < e_.size(); ++i)
      if (e_[i] > other.e_[i]) return false;
    return true;
  }

  Monomial operator*(const Monomial& o) const {
    Monomial r = *this;
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = static_cast<uint16_t>(r.e_[i] + o.e_[i]);
    return r;
  }

  /// Quotient; caller must ensure o.divides(*this).
  Monomial operator/(const Monomial& o) const {
    Monomial r = *this;
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = static_cast<uint16_t>(r.e_[i] - o.e_[i]);
    return r;
  }

  bool operator==(const Monomial& o) const { return e_ == o.e_; }

  bool operator<(const Monomial& o) const {
    int da = degree(), db = o.degree();
    if (da != db) return da < db;
    // same degree: lexicographic, earlier variable dominates
    for (size_t i = 0; i < e_.size(); ++i)
      if (e_[i] != o.e_[i]) return e_[i] < o.e_[i];
    return false;
  }

 private:
  std::vector<uint16_t> e_;
};

/// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int var);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  Rational constant_value() const;  // requires is_constant()

  int degree() const;           // total degree, 0 for the zero polynomial
  int degree_in(int var) const; // 0 for the zero polynomial
  bool depends_on(int var) const { return degree_in(var) > 0; }

  const std::map<Monomial, Rational>& terms() const { return terms_; }

  void add_term(const Monomial& m, const Rational& c);

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& c) const;
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial pow(int e) const;
  Polynomial derivative(int var) const;

  /// Leading term in graded-lex order. Requires nonzero.
  std::pair<Monomial, Rational> leading() const;

  /// Evaluate with variable images of any ring type supporting *, +.
  /// `one` supplies the multiplicative unit of T; coefficients enter via
  /// scale(one, c) = c * one.
  template <typename T, typename Scale>
  T eval(const std::vector<T>& images, const T& zero, const T& one, Scale scale) const {
    T acc = zero;
    // memoized powers per variable
    std::vector<std::vector<T>> pows(images.size());
    for (size_t v = 0; v < images.size(); ++v) pows[v].push_back(one);
    for (const auto& [m, c] : terms_) {
      T t = scale(one, c);
      for (int v = 0; v < nvars_; ++v) {
        int e = m.exp(v);
        if (e == 0) continue;
        auto& pv = pows[static_cast<size_t>(v)];
        while (static_cast<int>(pv.size()) <= e) pv.push_back(pv.back() * images[static_cast<size_t>(v)]);
        t = t * pv[static_cast<size_t>(e)];
      }
      acc = acc + t;
    }
    return acc;
  }

  Rational eval_rational(const std::vector<Rational>& point) const;

  /// Exact division; throws Error::Code::bad_argument if not divisible.
  static Polynomial divexact(const Polynomial& a, const Polynomial& b);

  /// GCD, normalized primitive with positive leading rational coefficient.
  /// gcd(0,0) = 0, gcd(a,0) = normalized a.
  static Polynomial gcd(const Polynomial& a, const Polynomial& b);

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  int nvars_;
  std::map<Monomial, Rational> terms_;
};

}  // namespace densalg
