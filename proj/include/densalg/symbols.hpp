#pragma once

#include "densalg/diffop.hpp"
#include "densalg/momentum.hpp"

namespace densalg {

/// Component matrix S^{ab} of a symmetric bi-derivation on chart functions.
/// Graded symmetry S^{ab} = (-1)^{a~ b~} S^{ba}; the bracket it evaluates is
/// {f,g} = S^{ab} (d_b f)(d_a g) (-1)^{a~ f~}, which satisfies
/// {f,g} = (-1)^{f~ g~} {g,f} at every operator parity.
struct Bracket {
  ChartPtr chart;
  Parity parity = Parity::even;
  std::vector<std::vector<GradedScalar>> s;

  static Bracket zero(ChartPtr chart, Parity parity);

  const GradedScalar& at(int a, int b) const {
    return s[static_cast<size_t>(a)][static_cast<size_t>(b)];
  }
  GradedScalar& at(int a, int b) { return s[static_cast<size_t>(a)][static_cast<size_t>(b)]; }

  /// componentwise evaluation on homogeneous or mixed arguments
  GradedScalar evaluate(const GradedScalar& f, const GradedScalar& g) const;

  /// check graded symmetry and entry parities; throws on violation
  void validate() const;

  bool operator==(const Bracket& o) const {
    return chart == o.chart && parity == o.parity && s == o.s;
  }
};

/// The bracket generated by a second-order operator via
///   {f,g} = d(fg) - (df)g - (-1)^{eps f~} f (dg) + d(1) fg.
GradedScalar operator_bracket(const DiffOperator& d, const GradedScalar& f,
                              const GradedScalar& g);

/// Extract the component matrix; requires order <= 2 (the error message for
/// higher order carries a bi-derivation witness triple).
Bracket bracket_from_operator(const DiffOperator& d);

/// quadratic momentum Hamiltonian (1/2) S^{ab} p_b p_a
MomentumPolynomial principal_symbol(const DiffOperator& d);
MomentumPolynomial bracket_hamiltonian(const PhaseSpace& ps, const Bracket& b);

/// components gamma^a = d_b S^{ba} (-1)^{b~(eps+1)} - 2 T^a
std::vector<GradedScalar> subprincipal_components(const DiffOperator& d);
/// gamma = gamma^a p_a
MomentumPolynomial subprincipal_symbol(const DiffOperator& d);

MomentumPolynomial gamma_hamiltonian(const PhaseSpace& ps,
                                     const std::vector<GradedScalar>& gamma);

/// Hamiltonian representative of a vector-like component tuple: the unique
/// momentum polynomial with (h_V, f) = V^a d_a f for all functions f. In this
/// normal form it is h_V = -sum_a (-1)^{a~} V^a p_a; the curvature, modular
/// and densities-Jacobi checks all contract through it.
MomentumPolynomial vector_hamiltonian(const PhaseSpace& ps,
                                      const std::vector<GradedScalar>& components);

/// Transformation-law certificate: compares the subprincipal components of
/// the pulled-back operator against the displayed law
///   gamma^{a'} = (gamma^a + S^{ab} d_b ln J) dx^{a'}/dx^a
/// with d_b ln J computed as (d_b J) J^-1.
struct ConnectionLawCertificate {
  bool equal = false;
  std::vector<GradedScalar> lhs;         // pullback of target components
  std::vector<GradedScalar> rhs;         // law-transformed source components
  std::vector<GradedScalar> difference;  // lhs - rhs
};

ConnectionLawCertificate verify_connection_law(const DiffOperator& d,
                                               const CoordinateChange& change);

/// F = (s, gamma); jacobi_ok reports whether (s,s) = 0.
struct CurvatureResult {
  MomentumPolynomial f;
  bool jacobi_ok = false;
  MomentumPolynomial jacobi_defect;
};

CurvatureResult curvature(const PhaseSpace& ps, const MomentumPolynomial& s,
                          const MomentumPolynomial& gamma);

/// nabla^a rho = (S^{ab} d_b + gamma^a) rho on a weight-1 coefficient.
std::vector<GradedScalar> upper_connection_derivative(const Bracket& s,
                                                      const std::vector<GradedScalar>& gamma,
                                                      const GradedScalar& rho);

}  // namespace densalg
