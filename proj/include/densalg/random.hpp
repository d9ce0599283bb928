#pragma once

#include "densalg/diffop.hpp"
#include "densalg/graded.hpp"

#include <cstdint>

namespace densalg {

/// Deterministic RNG (splitmix64). Not std::mt19937 on purpose: results must
/// be byte-identical across standard libraries for reproducible reports.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// uniform in [0, n)
  uint64_t below(uint64_t n) { return next() % n; }

  /// uniform in [lo, hi]
  long range(long lo, long hi) {
    return lo + static_cast<long>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  Rational rational(long max_abs = 5, long max_den = 3) {
    long num = range(-max_abs, max_abs);
    long den = range(1, max_den);
    return Rational(num, den);
  }

  Rational nonzero_rational(long max_abs = 5, long max_den = 3) {
    while (true) {
      Rational r = rational(max_abs, max_den);
      if (r != 0) return r;
    }
  }

 private:
  uint64_t state_;
};

/// Random polynomial in the chart's even variables, total degree <= max_degree.
Polynomial random_polynomial(Rng& rng, int nvars, int max_degree, int max_terms);

/// Random graded scalar with polynomial coefficients; any parity.
GradedScalar random_graded_scalar(Rng& rng, const ChartPtr& chart, int max_degree,
                                  int max_terms);

/// Random homogeneous graded scalar of the given parity.
GradedScalar random_graded_scalar_of_parity(Rng& rng, const ChartPtr& chart, Parity p,
                                            int max_degree, int max_terms);

/// Random operator of order <= max_order with polynomial coefficients.
DiffOperator random_operator(Rng& rng, const ChartPtr& chart, int max_order, int max_degree,
                             int max_terms);

/// Random parity-homogeneous operator.
DiffOperator random_operator_of_parity(Rng& rng, const ChartPtr& chart, Parity p, int max_order,
                                       int max_degree, int max_terms);

}  // namespace densalg

#include "densalg/density.hpp"

namespace densalg {

/// Random (S, gamma, theta) with the required graded symmetry and parities;
/// polynomial coefficients of total degree <= max_degree.
ExtendedBracketData random_bracket_data(Rng& rng, const ChartPtr& chart, Parity parity,
                                        int max_degree);

}  // namespace densalg
