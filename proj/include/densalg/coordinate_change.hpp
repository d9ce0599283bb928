#pragma once

#include "densalg/supermatrix.hpp"

#include <optional>

namespace densalg {

/// Invertible change of chart. `forward` gives each target coordinate as a
/// graded scalar over the source chart. An explicit inverse is optional:
/// when present the round trip through both substitutions is checked at
/// construction; either way the Jacobian body must be invertible.
class CoordinateChange {
 public:
  CoordinateChange(ChartPtr source, ChartPtr target, std::vector<GradedScalar> forward,
                   std::optional<std::vector<GradedScalar>> inverse = std::nullopt);

  const ChartPtr& source() const { return source_; }
  const ChartPtr& target() const { return target_; }
  const std::vector<GradedScalar>& forward() const { return forward_; }
  const std::optional<std::vector<GradedScalar>>& inverse() const { return inverse_; }

  /// rows: target coordinates, cols: source coordinates, entries over source
  const SuperMatrix& jacobian() const { return jacobian_; }

  /// Berezinian of the Jacobian, over the source chart.
  const GradedScalar& jacobian_berezinian() const { return ber_; }

  /// f over target -> f(forward(x)) over source
  GradedScalar pullback(const GradedScalar& f) const;

  /// f over source -> f(inverse(x')) over target; requires an explicit inverse
  GradedScalar pushforward(const GradedScalar& f) const;

 private:
  ChartPtr source_, target_;
  std::vector<GradedScalar> forward_;
  std::optional<std::vector<GradedScalar>> inverse_;
  SuperMatrix jacobian_;
  GradedScalar ber_;
};

}  // namespace densalg
