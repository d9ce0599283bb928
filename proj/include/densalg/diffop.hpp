#pragma once

#include "densalg/coordinate_change.hpp"

#include <map>

namespace densalg {

/// Derivative multi-index: multiset over even coordinates (exponents in
/// even-variable order) and a subset of odd coordinates. The operator
/// monomial it names is the composition
///   d_{even...} o d_{odd i1} o ... o d_{odd ik}   (i1 < ... < ik)
struct DerivIndex {
  std::vector<uint16_t> even;
  uint32_t odd_mask = 0;

  int total() const {
    int d = 0;
    for (auto e : even) d += e;
    d += std::popcount(odd_mask);
    return d;
  }
  int odd_count() const { return std::popcount(odd_mask); }

  bool operator==(const DerivIndex& o) const {
    return even == o.even && odd_mask == o.odd_mask;
  }
  bool operator<(const DerivIndex& o) const {
    int ta = total(), tb = o.total();
    if (ta != tb) return ta < tb;
    if (even != o.even) return even < o.even;
    return odd_mask < o.odd_mask;
  }
};

/// Normal-ordered linear differential operator: sum of coeff * d^alpha with
/// graded-scalar coefficients on the left. Canonical (zero coefficients
/// erased), so equality is structural.
class DiffOperator {
 public:
  explicit DiffOperator(ChartPtr chart);

  static DiffOperator zero(ChartPtr chart) { return DiffOperator(std::move(chart)); }
  static DiffOperator identity(ChartPtr chart);
  /// multiplication operator f *
  static DiffOperator mult(const GradedScalar& f);
  /// single first derivative d_coord
  static DiffOperator derivative(ChartPtr chart, int coord);
  static DiffOperator term(const GradedScalar& coeff, const DerivIndex& idx);

  const ChartPtr& chart() const { return chart_; }
  const std::map<DerivIndex, GradedScalar>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  /// Largest total degree with nonzero coefficient; 0 for the zero operator.
  int order() const;
  int declared_order() const { return declared_order_; }

  /// nullopt when terms mix parities; the zero operator reports even.
  /// Term parity = coefficient parity + number of odd derivatives (mod 2).
  std::optional<Parity> parity() const;
  bool is_homogeneous(Parity p) const;

  GradedScalar coefficient(const DerivIndex& idx) const;
  /// zeroth-order coefficient
  GradedScalar constant_term() const;

  GradedScalar apply(const GradedScalar& f) const;

  DiffOperator operator-() const;
  DiffOperator operator+(const DiffOperator& o) const;
  DiffOperator operator-(const DiffOperator& o) const;
  DiffOperator operator*(const Rational& c) const;
  /// left multiplication of every coefficient by f (the operator f * this)
  DiffOperator left_mult(const GradedScalar& f) const;
  bool operator==(const DiffOperator& o) const {
    return chart_ == o.chart_ && terms_ == o.terms_;
  }
  bool operator!=(const DiffOperator& o) const { return !(*this == o); }

  /// normal-ordered composition (this applied after o)
  DiffOperator compose(const DiffOperator& o) const;

  DiffOperator pow(int e) const;

  /// The operator over change.source() with pullback(d f) = d'(pullback f).
  DiffOperator pullback(const CoordinateChange& change) const;

  std::string to_string() const;

 private:
  ChartPtr chart_;
  std::map<DerivIndex, GradedScalar> terms_;
  int declared_order_ = 0;
  void add(const DerivIndex& idx, const GradedScalar& coeff);
  void refresh_declared_order();
  friend DiffOperator derivative_compose(int coord, const DiffOperator& op);
};

/// d_coord o op, normal-ordered.
DiffOperator derivative_compose(int coord, const DiffOperator& op);

/// Operator read as acting on densities of the given weight.
struct WeightedOperator {
  DiffOperator op;
  Rational weight;
};

/// Formal adjoint with respect to the coordinate volume: acts on
/// (1-weight)-densities. Generators: (f*)^adj = f*, (d_a)^adj = -d_a,
/// extended anti-multiplicatively with Koszul signs.
WeightedOperator formal_adjoint(const WeightedOperator& d);

/// Integration-by-parts certificate: currents K^a with
///   (d psi) chi - (-1)^{eps * parity(psi)} psi (d^adj chi) = sum_a d_a K^a
/// for homogeneous operator parity eps and homogeneous psi.
struct AdjointCertificate {
  DiffOperator adjoint;
  std::vector<GradedScalar> currents;  // indexed by chart coordinate
  GradedScalar lhs;                    // the integrand
  GradedScalar divergence;             // sum_a d_a K^a, recomputed
  bool verified = false;
};

AdjointCertificate adjoint_certificate(const DiffOperator& d, const GradedScalar& psi,
                                       const GradedScalar& chi);

/// Berezin integral on a purely odd chart: coefficient of the top monomial.
Rational berezin_integral(const GradedScalar& g);

/// Algebra-homomorphism image of op under d_a -> d_a + mult(lambda[a]).
/// This is exact conjugation by an invertible even multiplier u whenever
/// lambda[a] = u^-1 d_a u; u itself never enters.
DiffOperator twist_derivatives(const DiffOperator& op, const std::vector<GradedScalar>& lambda);

}  // namespace densalg
