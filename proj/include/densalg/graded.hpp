#pragma once

#include "densalg/chart.hpp"
#include "densalg/ratfun.hpp"

#include <cstdint>
#include <map>
#include <optional>

namespace densalg {

/// Koszul sign for merging two strictly increasing Grassmann index sets,
/// or 0 if they intersect (a generator squares to zero).
int grassmann_merge_sign(uint32_t a, uint32_t b);

/// Element of rationalfunctions(x_even) (x) Lambda(xi_odd) on a chart.
/// Terms map a Grassmann monomial (bit i set = odd coordinate with bit i
/// present, kept in chart order) to a rational-function coefficient.
/// Zero terms are erased, so equality is structural.
class GradedScalar {
 public:
  explicit GradedScalar(ChartPtr chart);

  static GradedScalar constant(ChartPtr chart, const Rational& c);
  static GradedScalar coordinate(ChartPtr chart, int coord);
  static GradedScalar from_ratfun(ChartPtr chart, const RationalFunction& f);
  static GradedScalar term(ChartPtr chart, uint32_t mask, const RationalFunction& f);

  const ChartPtr& chart() const { return chart_; }
  const std::map<uint32_t, RationalFunction>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;

  /// coefficient at the empty Grassmann monomial
  RationalFunction body() const;
  GradedScalar soul() const;

  /// nullopt when the element mixes parities; zero reports even
  std::optional<Parity> parity() const;
  bool is_homogeneous(Parity p) const;
  GradedScalar parity_part(Parity p) const;

  GradedScalar operator-() const;
  GradedScalar operator+(const GradedScalar& o) const;
  GradedScalar operator-(const GradedScalar& o) const;
  GradedScalar operator*(const GradedScalar& o) const;  // supercommutative Koszul product
  GradedScalar operator*(const Rational& c) const;
  GradedScalar operator*(const RationalFunction& f) const;
  bool operator==(const GradedScalar& o) const {
    return chart_ == o.chart_ && terms_ == o.terms_;
  }
  bool operator!=(const GradedScalar& o) const { return !(*this == o); }

  /// Left partial derivative in the named chart coordinate.
  GradedScalar partial(int coord) const;

  /// Inverse; requires nonzero body (the soul is nilpotent).
  GradedScalar inverse() const;
  GradedScalar pow(int e) const;

  /// Substitute per-coordinate images (over `target`) for this value's
  /// coordinates. Images must match coordinate parities; even-coordinate
  /// denominators must keep an invertible body after substitution.
  GradedScalar substitute(const std::vector<GradedScalar>& images, ChartPtr target) const;

  std::string to_string() const;

 private:
  ChartPtr chart_;
  std::map<uint32_t, RationalFunction> terms_;
  void add(uint32_t mask, const RationalFunction& f);
};

}  // namespace densalg
