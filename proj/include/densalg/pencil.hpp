#pragma once

#include "densalg/density.hpp"

namespace densalg {

/// Quadratic operator pencil delta0 + w A + w^2 B, read at weight w as an
/// operator on w-densities. Orders: delta0 <= 2, A <= 1, B zeroth order.
struct OperatorPencil {
  ChartPtr chart;
  DiffOperator delta0, a, b;

  OperatorPencil(DiffOperator delta0_, DiffOperator a_, DiffOperator b_);

  WeightedOperator specialize(const Rational& w) const;

  bool operator==(const OperatorPencil& o) const {
    return delta0 == o.delta0 && a == o.a && b == o.b;
  }
};

/// The canonical pencil of a weight-0 bracket on densities:
///   Delta_w = (1/2)( S^{ab} d_b d_a
///                  + (d_b S^{ba} (-1)^{b~(eps+1)} + (2w-1) gamma^a) d_a
///                  + w d_a gamma^a (-1)^{a~(eps+1)} + w(w-1) theta ).
OperatorPencil canonical_pencil(const ExtendedBracketData& data);

struct SelfAdjointCertificate {
  bool pass = false;
  std::vector<Rational> probes;
  std::vector<DiffOperator> defects;  // adjoint(Delta_w) - Delta_{1-w}
};

/// Checks (Delta_w)^adj = Delta_{1-w} at enough probe weights to pin a
/// quadratic pencil.
SelfAdjointCertificate check_selfadjoint(const OperatorPencil& p,
                                         const std::vector<Rational>& probes = {
                                             Rational(0), Rational(1, 2), Rational(2)});

/// Recover (S, gamma, theta) from one operator read at non-singular weight
/// w0 (w0 not in {0, 1/2, 1}); inverts the canonical-pencil formula.
ExtendedBracketData pencil_from_operator(const DiffOperator& d, const Rational& w0);

/// Componentwise pullback with the weight twist: the w-specialization
/// transforms as an operator on w-densities (conjugation by Ber(J)^w,
/// expanded exactly through d_a(J^w) J^{-w} = w (d_a J) J^{-1}).
OperatorPencil pencil_pullback(const OperatorPencil& p, const CoordinateChange& change);

/// One specialization transported with the density twist.
DiffOperator weighted_pullback(const DiffOperator& op, const Rational& w,
                               const CoordinateChange& change);

}  // namespace densalg
