#include "densalg/supermatrix.hpp"

#include <algorithm>
#include <numeric>

namespace densalg {

SuperMatrix::SuperMatrix(ChartPtr chart, std::vector<Parity> row_par, std::vector<Parity> col_par)
    : chart_(std::move(chart)), row_par_(std::move(row_par)), col_par_(std::move(col_par)) {
  m_.assign(row_par_.size(), std::vector<GradedScalar>(col_par_.size(), GradedScalar(chart_)));
}

SuperMatrix SuperMatrix::identity(ChartPtr chart, const std::vector<Parity>& par) {
  SuperMatrix r(chart, par, par);
  for (int i = 0; i < r.rows(); ++i) r.at(i, i) = GradedScalar::constant(chart, Rational(1));
  return r;
}

SuperMatrix SuperMatrix::operator*(const SuperMatrix& o) const {
  if (cols() != o.rows())
    throw Error(Error::Code::bad_argument, "supermatrix dimension mismatch");
  SuperMatrix r(chart_, row_par_, o.col_par_);
  for (int i = 0; i < rows(); ++i)
    for (int k = 0; k < o.cols(); ++k) {
      GradedScalar acc(chart_);
      for (int j = 0; j < cols(); ++j) acc = acc + at(i, j) * o.at(j, k);
      r.at(i, k) = acc;
    }
  return r;
}

bool SuperMatrix::operator==(const SuperMatrix& o) const {
  if (rows() != o.rows() || cols() != o.cols()) return false;
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j)
      if (!(at(i, j) == o.at(i, j))) return false;
  return true;
}

namespace {

GradedScalar det_recursive(const SuperMatrix& m, std::vector<int> rows, std::vector<int> cols) {
  ChartPtr chart = m.chart();
  if (rows.empty()) return GradedScalar::constant(chart, Rational(1));
  if (rows.size() == 1) return m.at(rows[0], cols[0]);
  GradedScalar acc(chart);
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (size_t j = 0; j < cols.size(); ++j) {
    const GradedScalar& e = m.at(rows[0], cols[j]);
    if (e.is_zero()) continue;
    std::vector<int> sub_cols;
    for (size_t k = 0; k < cols.size(); ++k)
      if (k != j) sub_cols.push_back(cols[k]);
    GradedScalar minor = det_recursive(m, sub_rows, sub_cols);
    GradedScalar term = e * minor;
    if (j & 1) term = -term;
    acc = acc + term;
  }
  return acc;
}

}  // namespace

GradedScalar determinant_even(const SuperMatrix& m) {
  if (m.rows() != m.cols())
    throw Error(Error::Code::bad_argument, "determinant of non-square matrix");
  std::vector<int> idx(static_cast<size_t>(m.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  return det_recursive(m, idx, idx);
}

GradedScalar berezinian(const SuperMatrix& m) {
  ChartPtr chart = m.chart();
  std::vector<int> er, orr, ec, oc;
  for (int i = 0; i < m.rows(); ++i)
    (m.row_parity(i) == Parity::even ? er : orr).push_back(i);
  for (int j = 0; j < m.cols(); ++j)
    (m.col_parity(j) == Parity::even ? ec : oc).push_back(j);
  if (er.size() != ec.size() || orr.size() != oc.size())
    throw Error(Error::Code::bad_argument, "matrix is not square in the super sense");

  auto sub = [&](const std::vector<int>& rows, const std::vector<int>& cols, std::vector<Parity> rp,
                 std::vector<Parity> cp) {
    SuperMatrix s(chart, std::move(rp), std::move(cp));
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < cols.size(); ++j)
        s.at(static_cast<int>(i), static_cast<int>(j)) = m.at(rows[i], cols[j]);
    return s;
  };

  std::vector<Parity> pe(er.size(), Parity::even), po(orr.size(), Parity::even);

  if (orr.empty()) {
    return determinant_even(sub(er, ec, pe, pe));
  }

  SuperMatrix d = sub(orr, oc, po, po);  // odd-odd block: entries even
  GradedScalar det_d = determinant_even(d);
  if (det_d.body().is_zero())
    throw Error(Error::Code::non_invertible, "odd-odd block has non-invertible body");

  if (er.empty()) return det_d.inverse();

  // D^-1 via the adjugate (entries even, so they commute)
  SuperMatrix dinv(chart, po, po);
  {
    int n = d.rows();
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    GradedScalar inv_det = det_d.inverse();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::vector<int> rs, cs;
        for (int k = 0; k < n; ++k)
          if (k != j) rs.push_back(k);
        for (int k = 0; k < n; ++k)
          if (k != i) cs.push_back(k);
        GradedScalar cof = det_recursive(d, rs, cs);
        if ((i + j) & 1) cof = -cof;
        dinv.at(i, j) = cof * inv_det;
      }
  }

  SuperMatrix a = sub(er, ec, pe, pe);
  std::vector<Parity> podd(orr.size(), Parity::odd);
  SuperMatrix b = sub(er, oc, pe, podd);
  SuperMatrix c = sub(orr, ec, podd, pe);

  // Schur complement A - B D^-1 C (entries even)
  SuperMatrix bdc = b * dinv * c;
  SuperMatrix schur(chart, pe, pe);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) schur.at(i, j) = a.at(i, j) - bdc.at(i, j);

  return determinant_even(schur) * det_d.inverse();
}

std::vector<GradedScalar> solve_linear(const SuperMatrix& m, const std::vector<GradedScalar>& rhs) {
  if (m.rows() != m.cols() || static_cast<int>(rhs.size()) != m.rows())
    throw Error(Error::Code::bad_argument, "solve_linear requires a square system");
  int n = m.rows();
  ChartPtr chart = m.chart();

  // working copies
  std::vector<std::vector<GradedScalar>> a(static_cast<size_t>(n),
                                           std::vector<GradedScalar>(static_cast<size_t>(n), GradedScalar(chart)));
  std::vector<GradedScalar> r(rhs);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = m.at(i, j);

  std::vector<int> pivot_row_of_col(static_cast<size_t>(n), -1);
  std::vector<bool> row_used(static_cast<size_t>(n), false);

  for (int step = 0; step < n; ++step) {
    int pr = -1, pc = -1;
    for (int i = 0; i < n && pr < 0; ++i) {
      if (row_used[static_cast<size_t>(i)]) continue;
      for (int j = 0; j < n; ++j) {
        if (pivot_row_of_col[static_cast<size_t>(j)] >= 0) continue;
        if (!a[static_cast<size_t>(i)][static_cast<size_t>(j)].body().is_zero()) {
          pr = i;
          pc = j;
          break;
        }
      }
    }
    if (pr < 0)
      throw Error(Error::Code::degenerate_structure, "linear system is degenerate");
    row_used[static_cast<size_t>(pr)] = true;
    pivot_row_of_col[static_cast<size_t>(pc)] = pr;

    GradedScalar inv_p = a[static_cast<size_t>(pr)][static_cast<size_t>(pc)].inverse();
    for (int i = 0; i < n; ++i) {
      if (i == pr) continue;
      GradedScalar f = a[static_cast<size_t>(i)][static_cast<size_t>(pc)] * inv_p;
      if (f.is_zero()) continue;
      for (int j = 0; j < n; ++j)
        a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * a[static_cast<size_t>(pr)][static_cast<size_t>(j)];
      r[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] - f * r[static_cast<size_t>(pr)];
    }
  }

  // back substitution: each row now has exactly one pivot column live
  std::vector<GradedScalar> v(static_cast<size_t>(n), GradedScalar(chart));
  for (int j = 0; j < n; ++j) {
    int i = pivot_row_of_col[static_cast<size_t>(j)];
    v[static_cast<size_t>(j)] = a[static_cast<size_t>(i)][static_cast<size_t>(j)].inverse() * r[static_cast<size_t>(i)];
  }
  return v;
}

}  // namespace densalg
