#pragma once

#include "densalg/symbols.hpp"

#include <optional>

namespace densalg {

/// Finite formal sum of densities sum_w t^w psi_w(x) with exact rational
/// weights. Weight 0 parts are functions, weight 1 parts volume forms.
class DensityElement {
 public:
  explicit DensityElement(ChartPtr chart) : chart_(std::move(chart)) {}

  static DensityElement pure(const Rational& weight, const GradedScalar& coeff);
  static DensityElement function(const GradedScalar& coeff) { return pure(Rational(0), coeff); }

  const ChartPtr& chart() const { return chart_; }
  const std::map<Rational, GradedScalar>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  GradedScalar coefficient(const Rational& weight) const;
  std::optional<Rational> pure_weight() const;  // set when exactly one weight

  DensityElement operator-() const;
  DensityElement operator+(const DensityElement& o) const;
  DensityElement operator-(const DensityElement& o) const;
  /// weights add, coefficients multiply with Koszul signs
  DensityElement operator*(const DensityElement& o) const;
  DensityElement operator*(const Rational& c) const;
  bool operator==(const DensityElement& o) const {
    return chart_ == o.chart_ && terms_ == o.terms_;
  }
  bool operator!=(const DensityElement& o) const { return !(*this == o); }

  /// finite support, sorted by weight
  std::vector<std::pair<Rational, GradedScalar>> weight_decompose() const;

 private:
  ChartPtr chart_;
  std::map<Rational, GradedScalar> terms_;
  void add(const Rational& w, const GradedScalar& g);
};

/// The matrix [[S^{ab}, t gamma^a], [t gamma^a, t^2 theta]] on the extended
/// manifold: a weight-0 bracket on the algebra of densities.
struct ExtendedBracketData {
  Bracket s;
  std::vector<GradedScalar> gamma;
  GradedScalar theta;

  ExtendedBracketData(Bracket s_, std::vector<GradedScalar> gamma_, GradedScalar theta_);

  const ChartPtr& chart() const { return s.chart; }
  Parity parity() const { return s.parity; }

  /// entry parities: S^{ab} ~ eps+a~+b~, gamma^a ~ eps+a~, theta ~ eps
  void validate() const;

  bool operator==(const ExtendedBracketData& o) const {
    return s == o.s && gamma == o.gamma && theta == o.theta;
  }
};

/// Bi-derivation of weight zero on generating functions psi(x,t):
///   {psi,chi} = S^{ab}(d_b psi)(d_a chi)(-1)^{a~ psi~}
///             + u t^{u+v} gamma^a psi_u (d_a chi_v)(-1)^{a~ psi~}
///             + v t^{u+v} gamma^a (d_a psi_u) chi_v
///             + u v t^{u+v} theta psi_u chi_v
/// (t even; d_t t^w = w t^{w-1}).
DensityElement densities_bracket(const ExtendedBracketData& data, const DensityElement& a,
                                 const DensityElement& b);

/// Residue pairing: the weight-1 integrand sum_w psi_w chi_{1-w}; on purely
/// odd charts also its exact Berezin value.
struct ScalarProduct {
  GradedScalar integrand;
  std::optional<Rational> berezin_value;
};

ScalarProduct dens_scalar_product(const DensityElement& a, const DensityElement& b);

}  // namespace densalg
