#pragma once

#include "densalg/graded.hpp"

#include <vector>

namespace densalg {

/// Matrix of graded scalars with declared row/column parities. Entries are
/// expected homogeneous of parity row+col where a Berezinian is taken.
class SuperMatrix {
 public:
  SuperMatrix(ChartPtr chart, std::vector<Parity> row_par, std::vector<Parity> col_par);

  static SuperMatrix identity(ChartPtr chart, const std::vector<Parity>& par);

  int rows() const { return static_cast<int>(row_par_.size()); }
  int cols() const { return static_cast<int>(col_par_.size()); }
  Parity row_parity(int i) const { return row_par_[static_cast<size_t>(i)]; }
  Parity col_parity(int j) const { return col_par_[static_cast<size_t>(j)]; }
  const ChartPtr& chart() const { return chart_; }

  const GradedScalar& at(int i, int j) const { return m_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  GradedScalar& at(int i, int j) { return m_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }

  /// (AB)^i_k = sum_j A^i_j * B^j_k, products taken in that order.
  SuperMatrix operator*(const SuperMatrix& o) const;

  bool operator==(const SuperMatrix& o) const;

 private:
  ChartPtr chart_;
  std::vector<Parity> row_par_, col_par_;
  std::vector<std::vector<GradedScalar>> m_;
};

/// Determinant of a square matrix whose entries are all even (they commute).
GradedScalar determinant_even(const SuperMatrix& m);

/// Berezinian det(A - B D^-1 C) * det(D)^-1 in the parity-sorted basis
/// (stable sort of rows and columns by parity; no permutation sign).
/// Requires the body of det(D) (and of det of the Schur complement's
/// denominator chain) to be invertible.
GradedScalar berezinian(const SuperMatrix& m);

/// Solve sum_j M^i_j v_j = rhs_i with left-coefficient convention; pivots
/// must have invertible body. Throws Error::Code::degenerate_structure if
/// no pivot can be found.
std::vector<GradedScalar> solve_linear(const SuperMatrix& m, const std::vector<GradedScalar>& rhs);

}  // namespace densalg
