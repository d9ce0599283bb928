#pragma once

#include "densalg/graded.hpp"

namespace densalg {

/// Fiberwise-polynomial functions on T*M are graded scalars over an extended
/// chart: the base coordinates followed by their conjugate momenta, each
/// momentum carrying the parity of its coordinate. Momentum names use the
/// display form "p[x]", which cannot collide with user identifiers.
using MomentumPolynomial = GradedScalar;

class PhaseSpace {
 public:
  static PhaseSpace of(const ChartPtr& base);

  const ChartPtr& base() const { return base_; }
  const ChartPtr& extended() const { return extended_; }

  /// extended-chart coordinate index of the momentum conjugate to base coord.
  int momentum_coord(int base_coord) const { return base_->size() + base_coord; }

  MomentumPolynomial momentum(int base_coord) const {
    return GradedScalar::coordinate(extended_, momentum_coord(base_coord));
  }

  /// base-chart scalar viewed on the extended chart
  MomentumPolynomial lift(const GradedScalar& f) const;

  /// momentum-free extended scalar back on the base chart
  GradedScalar drop(const MomentumPolynomial& f) const;

  bool is_momentum_free(const MomentumPolynomial& f) const;

  /// total momentum degree of a fiberwise-polynomial Hamiltonian
  int momentum_degree(const MomentumPolynomial& f) const;

  /// the piece with exactly the given momentum degree
  MomentumPolynomial momentum_part(const MomentumPolynomial& f, int degree) const;

  /// denominators must be momentum-free and momentum degree <= 4
  void validate(const MomentumPolynomial& f) const;

  /// Canonical even Poisson bracket of fiberwise-polynomial Hamiltonians.
  /// Convention (pinned by tests): (x^a, p_a) = 1, graded antisymmetry,
  /// graded Leibniz, graded Jacobi:
  ///   (f,g) = sum_a [ (-1)^{a~(f~+1)} (df/dx^a)(dg/dp_a)
  ///                 - (-1)^{a~ f~}   (df/dp_a)(dg/dx^a) ]
  MomentumPolynomial poisson(const MomentumPolynomial& f, const MomentumPolynomial& g) const;

 private:
  PhaseSpace(ChartPtr base, ChartPtr extended)
      : base_(std::move(base)), extended_(std::move(extended)) {}
  ChartPtr base_;
  ChartPtr extended_;
};

}  // namespace densalg
