#include "densalg/diffop.hpp"

#include <bit>
#include <sstream>

namespace densalg {

DiffOperator::DiffOperator(ChartPtr chart) : chart_(std::move(chart)) {}

DiffOperator DiffOperator::identity(ChartPtr chart) {
  return mult(GradedScalar::constant(chart, Rational(1)));
}

DiffOperator DiffOperator::mult(const GradedScalar& f) {
  DiffOperator d(f.chart());
  DerivIndex idx;
  idx.even.assign(static_cast<size_t>(f.chart()->n_even()), 0);
  d.add(idx, f);
  return d;
}

DiffOperator DiffOperator::derivative(ChartPtr chart, int coord) {
  if (coord < 0 || coord >= chart->size())
    throw Error(Error::Code::unknown_coordinate, "coordinate index out of range");
  DerivIndex idx;
  idx.even.assign(static_cast<size_t>(chart->n_even()), 0);
  if (chart->parity(coord) == Parity::even)
    idx.even[static_cast<size_t>(chart->even_var(coord))] = 1;
  else
    idx.odd_mask = 1u << chart->odd_bit(coord);
  DiffOperator d(chart);
  d.add(idx, GradedScalar::constant(chart, Rational(1)));
  return d;
}

DiffOperator DiffOperator::term(const GradedScalar& coeff, const DerivIndex& idx) {
  DiffOperator d(coeff.chart());
  if (static_cast<int>(idx.even.size()) != coeff.chart()->n_even())
    throw Error(Error::Code::bad_argument, "derivative index does not fit the chart");
  d.add(idx, coeff);
  return d;
}

void DiffOperator::add(const DerivIndex& idx, const GradedScalar& coeff) {
  if (coeff.is_zero()) return;
  auto it = terms_.find(idx);
  if (it == terms_.end()) {
    terms_.emplace(idx, coeff);
  } else {
    GradedScalar s = it->second + coeff;
    if (s.is_zero())
      terms_.erase(it);
    else
      it->second = std::move(s);
  }
  refresh_declared_order();
}

void DiffOperator::refresh_declared_order() {
  declared_order_ = terms_.empty() ? 0 : terms_.rbegin()->first.total();
}

int DiffOperator::order() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.total();
}

std::optional<Parity> DiffOperator::parity() const {
  if (terms_.empty()) return Parity::even;
  std::optional<Parity> result;
  for (const auto& [idx, c] : terms_) {
    auto cp = c.parity();
    if (!cp.has_value()) return std::nullopt;
    Parity tp = parity_add(*cp, static_cast<Parity>(idx.odd_count() & 1));
    if (!result)
      result = tp;
    else if (*result != tp)
      return std::nullopt;
  }
  return result;
}

bool DiffOperator::is_homogeneous(Parity p) const {
  auto q = parity();
  return q.has_value() && (is_zero() || *q == p);
}

GradedScalar DiffOperator::coefficient(const DerivIndex& idx) const {
  auto it = terms_.find(idx);
  if (it == terms_.end()) return GradedScalar(chart_);
  return it->second;
}

GradedScalar DiffOperator::constant_term() const {
  DerivIndex idx;
  idx.even.assign(static_cast<size_t>(chart_->n_even()), 0);
  return coefficient(idx);
}

GradedScalar DiffOperator::apply(const GradedScalar& f) const {
  require_same_chart(chart_, f.chart());
  GradedScalar result(chart_);
  for (const auto& [idx, c] : terms_) {
    GradedScalar g = f;
    // rightmost factor applies first: odd derivatives by descending bit
    uint32_t mm = idx.odd_mask;
    while (mm) {
      int bit = 31 - std::countl_zero(mm);
      mm &= ~(1u << bit);
      g = g.partial(chart_->odd_coord(bit));
    }
    for (size_t v = 0; v < idx.even.size(); ++v)
      for (int k = 0; k < idx.even[v]; ++k) g = g.partial(chart_->even_coord(static_cast<int>(v)));
    result = result + c * g;
  }
  return result;
}

DiffOperator DiffOperator::operator-() const {
  DiffOperator d(chart_);
  for (const auto& [idx, c] : terms_) d.terms_.emplace(idx, -c);
  d.refresh_declared_order();
  return d;
}

DiffOperator DiffOperator::operator+(const DiffOperator& o) const {
  require_same_chart(chart_, o.chart_);
  DiffOperator d = *this;
  for (const auto& [idx, c] : o.terms_) d.add(idx, c);
  return d;
}

DiffOperator DiffOperator::operator-(const DiffOperator& o) const {
  require_same_chart(chart_, o.chart_);
  DiffOperator d = *this;
  for (const auto& [idx, c] : o.terms_) d.add(idx, -c);
  return d;
}

DiffOperator DiffOperator::operator*(const Rational& k) const {
  DiffOperator d(chart_);
  if (k == 0) return d;
  for (const auto& [idx, c] : terms_) d.terms_.emplace(idx, c * k);
  d.refresh_declared_order();
  return d;
}

DiffOperator DiffOperator::left_mult(const GradedScalar& f) const {
  require_same_chart(chart_, f.chart());
  DiffOperator d(chart_);
  for (const auto& [idx, c] : terms_) d.add(idx, f * c);
  return d;
}

DiffOperator derivative_compose(int coord, const DiffOperator& op) {
  const ChartPtr& chart = op.chart();
  DiffOperator out(chart);
  bool coord_odd = chart->parity(coord) == Parity::odd;
  for (const auto& [idx, c] : op.terms()) {
    // Leibniz: d_c (coeff * D) = (d_c coeff) * D + (-1)^{c~ * coeff~} coeff * (d_c . D)
    out.add(idx, c.partial(coord));

    GradedScalar passed = c;
    if (coord_odd) passed = c.parity_part(Parity::even) - c.parity_part(Parity::odd);

    DerivIndex merged = idx;
    int sign = 1;
    if (!coord_odd) {
      size_t v = static_cast<size_t>(chart->even_var(coord));
      merged.even[v] = static_cast<uint16_t>(merged.even[v] + 1);
    } else {
      uint32_t bit = 1u << chart->odd_bit(coord);
      if (idx.odd_mask & bit) continue;  // repeated odd derivative vanishes
      int below = std::popcount(idx.odd_mask & (bit - 1));
      sign = (below & 1) ? -1 : 1;
      merged.odd_mask |= bit;
    }
    GradedScalar coeff = sign < 0 ? -passed : passed;
    out.add(merged, coeff);
  }
  return out;
}

DiffOperator DiffOperator::compose(const DiffOperator& o) const {
  require_same_chart(chart_, o.chart_);
  DiffOperator result(chart_);
  for (const auto& [idx, c] : terms_) {
    DiffOperator tmp = o;
    // push factors in from the right: odd derivatives descending, then evens
    uint32_t mm = idx.odd_mask;
    while (mm) {
      int bit = 31 - std::countl_zero(mm);
      mm &= ~(1u << bit);
      tmp = derivative_compose(chart_->odd_coord(bit), tmp);
    }
    for (size_t v = 0; v < idx.even.size(); ++v)
      for (int k = 0; k < idx.even[v]; ++k)
        tmp = derivative_compose(chart_->even_coord(static_cast<int>(v)), tmp);
    result = result + tmp.left_mult(c);
  }
  return result;
}

DiffOperator DiffOperator::pow(int e) const {
  DiffOperator acc = identity(chart_);
  for (int i = 0; i < e; ++i) acc = acc.compose(*this);
  return acc;
}

namespace {

// factor decomposition of one normal-form term: mult(coeff) o derivatives
struct Factor {
  bool is_mult;
  int coord = -1;          // for derivatives
  GradedScalar coeff;      // for mult factors; homogeneous
  Parity parity = Parity::even;
  Factor(const GradedScalar& f, Parity p) : is_mult(true), coeff(f), parity(p) {}
  Factor(int c, Parity p) : is_mult(false), coord(c), coeff(ChartPtr()), parity(p) {}
};

std::vector<Factor> term_factors(const ChartPtr& chart, const DerivIndex& idx,
                                 const GradedScalar& coeff, Parity coeff_parity) {
  std::vector<Factor> fs;
  fs.emplace_back(coeff, coeff_parity);
  for (size_t v = 0; v < idx.even.size(); ++v)
    for (int k = 0; k < idx.even[v]; ++k)
      fs.emplace_back(chart->even_coord(static_cast<int>(v)), Parity::even);
  uint32_t mm = idx.odd_mask;
  while (mm) {
    int bit = std::countr_zero(mm);
    mm &= mm - 1;
    fs.emplace_back(chart->odd_coord(bit), Parity::odd);
  }
  return fs;
}

DiffOperator factor_adjoint_compose(const ChartPtr& chart, const std::vector<Factor>& fs) {
  // (F1 ... Fm)^adj = sign * Fm^adj o ... o F1^adj,
  // sign = (-1)^{sum_{i<j} p_i p_j}; each derivative adjoint contributes -1.
  int cross = 0, seen_odd = 0, nderiv = 0;
  for (const auto& f : fs) {
    if (parity_bit(f.parity)) {
      cross += seen_odd;
      ++seen_odd;
    }
    if (!f.is_mult) ++nderiv;
  }
  int sign = ((cross + nderiv) & 1) ? -1 : 1;

  DiffOperator acc = DiffOperator::identity(chart);
  // prepend factors in original order; the result is Fm o ... o F1
  for (const auto& f : fs) {
    if (f.is_mult)
      acc = DiffOperator::mult(f.coeff).compose(acc);
    else
      acc = derivative_compose(f.coord, acc);
  }
  return acc * Rational(sign);
}

}  // namespace

WeightedOperator formal_adjoint(const WeightedOperator& d) {
  const ChartPtr& chart = d.op.chart();
  DiffOperator result(chart);
  for (const auto& [idx, c] : d.op.terms()) {
    for (Parity p : {Parity::even, Parity::odd}) {
      GradedScalar part = c.parity_part(p);
      if (part.is_zero()) continue;
      auto fs = term_factors(chart, idx, part, p);
      result = result + factor_adjoint_compose(chart, fs);
    }
  }
  return WeightedOperator{result, Rational(1) - d.weight};
}

AdjointCertificate adjoint_certificate(const DiffOperator& d, const GradedScalar& psi,
                                       const GradedScalar& chi) {
  const ChartPtr& chart = d.chart();
  require_same_chart(chart, psi.chart());
  require_same_chart(chart, chi.chart());
  auto eps = d.parity();
  auto psip = psi.parity();
  if (!eps.has_value())
    throw Error(Error::Code::parity_mismatch, "certificate requires a homogeneous operator");
  if (!psip.has_value())
    throw Error(Error::Code::parity_mismatch, "certificate requires homogeneous psi");

  AdjointCertificate cert{DiffOperator(chart), std::vector<GradedScalar>(
                              static_cast<size_t>(chart->size()), GradedScalar(chart)),
                          GradedScalar(chart), GradedScalar(chart), false};

  DiffOperator adj(chart);

  for (const auto& [idx, c] : d.terms()) {
    for (Parity p : {Parity::even, Parity::odd}) {
      GradedScalar part = c.parity_part(p);
      if (part.is_zero()) continue;
      auto fs = term_factors(chart, idx, part, p);

      // suffix parities
      int m = static_cast<int>(fs.size());
      std::vector<int> suffix_par(static_cast<size_t>(m) + 1, 0);
      for (int i = m - 1; i >= 0; --i)
        suffix_par[static_cast<size_t>(i)] =
            (suffix_par[static_cast<size_t>(i) + 1] + parity_bit(fs[static_cast<size_t>(i)].parity)) & 1;

      // rest_applied[i] = (F_{i+1} o ... o F_m)(psi)
      std::vector<GradedScalar> rest_applied(static_cast<size_t>(m) + 1, GradedScalar(chart));
      rest_applied[static_cast<size_t>(m)] = psi;
      for (int i = m - 1; i >= 0; --i) {
        const Factor& f = fs[static_cast<size_t>(i)];
        const GradedScalar& u = rest_applied[static_cast<size_t>(i) + 1];
        rest_applied[static_cast<size_t>(i)] = f.is_mult ? f.coeff * u : u.partial(f.coord);
      }

      // walk left to right, accumulating currents and evolving chi
      GradedScalar chi_cur = chi;
      int outer_sign = 1;
      int psi_par = parity_bit(*psip);
      for (int i = 0; i < m; ++i) {
        const Factor& f = fs[static_cast<size_t>(i)];
        if (!f.is_mult) {
          // K^a picks up (rest psi) * chi with the accumulated sign
          GradedScalar add = rest_applied[static_cast<size_t>(i) + 1] * chi_cur;
          if (outer_sign < 0) add = -add;
          cert.currents[static_cast<size_t>(f.coord)] =
              cert.currents[static_cast<size_t>(f.coord)] + add;
        }
        // recursion sign for the tail: (-1)^{p(F_i) (p(rest) + p(psi))}
        int s = parity_bit(f.parity) * ((suffix_par[static_cast<size_t>(i) + 1] + psi_par) & 1);
        if (s) outer_sign = -outer_sign;
        // chi evolves by F_i^adj
        chi_cur = f.is_mult ? f.coeff * chi_cur : -chi_cur.partial(f.coord);
      }

      auto ffs = term_factors(chart, idx, part, p);
      adj = adj + factor_adjoint_compose(chart, ffs);
    }
  }

  cert.adjoint = adj;
  GradedScalar lhs = d.apply(psi) * chi;
  GradedScalar correction = psi * adj.apply(chi);
  if (parity_bit(*eps) && parity_bit(*psip)) correction = -correction;
  cert.lhs = lhs - correction;

  GradedScalar div(chart);
  for (int a = 0; a < chart->size(); ++a)
    div = div + cert.currents[static_cast<size_t>(a)].partial(a);
  cert.divergence = div;
  cert.verified = (cert.lhs == cert.divergence);
  return cert;
}

DiffOperator twist_derivatives(const DiffOperator& op, const std::vector<GradedScalar>& lambda) {
  const ChartPtr& chart = op.chart();
  if (static_cast<int>(lambda.size()) != chart->size())
    throw Error(Error::Code::bad_argument, "one twist coefficient per coordinate required");
  DiffOperator result(chart);
  for (const auto& [idx, c] : op.terms()) {
    DiffOperator acc = DiffOperator::identity(chart);
    // canonical factor sequence, prepended right to left
    std::vector<int> seq;
    for (size_t v = 0; v < idx.even.size(); ++v)
      for (int k = 0; k < idx.even[v]; ++k) seq.push_back(chart->even_coord(static_cast<int>(v)));
    uint32_t mm = idx.odd_mask;
    while (mm) {
      int bit = std::countr_zero(mm);
      mm &= mm - 1;
      seq.push_back(chart->odd_coord(bit));
    }
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
      int coord = *it;
      DiffOperator twisted =
          DiffOperator::derivative(chart, coord) + DiffOperator::mult(lambda[static_cast<size_t>(coord)]);
      acc = twisted.compose(acc);
    }
    result = result + acc.left_mult(c);
  }
  return result;
}

Rational berezin_integral(const GradedScalar& g) {
  const ChartPtr& chart = g.chart();
  if (chart->n_even() != 0)
    throw Error(Error::Code::bad_argument, "Berezin integral needs a purely odd chart");
  uint32_t top = chart->n_odd() >= 32 ? ~0u : ((1u << chart->n_odd()) - 1);
  auto it = g.terms().find(top);
  if (it == g.terms().end()) return Rational(0);
  return it->second.constant_value();
}

DiffOperator DiffOperator::pullback(const CoordinateChange& change) const {
  if (chart_ != change.target())
    throw Error(Error::Code::chart_mismatch, "pullback expects an operator over the target chart");
  const ChartPtr& src = change.source();
  int n = src->size();
  if (change.target()->size() != n)
    throw Error(Error::Code::bad_argument, "pullback needs equal-dimension charts");

  // Solve for the vector fields L_{a'} = sum_a w^{a'}_a d_a with
  // sum_a w^{a'}_a * (d_a fwd^{c'}) = delta^{a' c'}.
  std::vector<Parity> src_par, tgt_par;
  for (int i = 0; i < n; ++i) src_par.push_back(src->parity(i));
  for (int i = 0; i < n; ++i) tgt_par.push_back(change.target()->parity(i));

  SuperMatrix b(src, src_par, tgt_par);  // b[a][c'] = jacobian[c'][a]
  for (int a = 0; a < n; ++a)
    for (int cp = 0; cp < n; ++cp) b.at(a, cp) = change.jacobian().at(cp, a);

  // right inverse of b, column by column; it is two-sided, so the same
  // matrix satisfies sum_a inv[a'][a] * b[a][c'] = delta with left-ordered
  // products. inv[col= a][row out= c'] layout: inv_cols[a][c'].
  std::vector<std::vector<GradedScalar>> inv_cols(static_cast<size_t>(n));
  for (int col = 0; col < n; ++col) {
    std::vector<GradedScalar> e(static_cast<size_t>(n), GradedScalar(src));
    e[static_cast<size_t>(col)] = GradedScalar::constant(src, Rational(1));
    inv_cols[static_cast<size_t>(col)] = solve_linear(b, e);
  }

  std::vector<DiffOperator> lifted;  // L_{a'} = sum_a w^{a'}_a d_a, w^{a'}_a = inv_cols[a][a']
  for (int ap = 0; ap < n; ++ap) {
    DiffOperator L(src);
    for (int a = 0; a < n; ++a)
      L = L + DiffOperator::mult(inv_cols[static_cast<size_t>(a)][static_cast<size_t>(ap)])
                  .compose(DiffOperator::derivative(src, a));
    lifted.push_back(L);
  }

  DiffOperator result(src);
  for (const auto& [idx, c] : terms_) {
    DiffOperator tmp = DiffOperator::identity(src);
    // rightmost first, same canonical sequence as apply/compose
    uint32_t mm = idx.odd_mask;
    std::vector<int> seq;
    for (size_t v = 0; v < idx.even.size(); ++v)
      for (int k = 0; k < idx.even[v]; ++k)
        seq.push_back(chart_->even_coord(static_cast<int>(v)));
    while (mm) {
      int bit = std::countr_zero(mm);
      mm &= mm - 1;
      seq.push_back(chart_->odd_coord(bit));
    }
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
      int tcoord = *it;
      tmp = lifted[static_cast<size_t>(tcoord)].compose(tmp);
    }
    result = result + tmp.left_mult(change.pullback(c));
  }
  return result;
}

std::string DiffOperator::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [idx, c] = *it;
    std::string cs = c.to_string();
    bool neg = false;
    if (!cs.empty() && cs[0] == '-' && cs.find(' ') == std::string::npos) {
      neg = true;
      cs = cs.substr(1);
    }
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    first = false;
    bool any_deriv = idx.total() > 0;
    bool wrap = cs.find(' ') != std::string::npos || cs.find('/') != std::string::npos;
    std::string printed = wrap ? "(" + cs + ")" : cs;
    if (!any_deriv) {
      os << printed;
    } else {
      if (printed != "1") os << printed << "*";
      bool firstd = true;
      for (size_t v = 0; v < idx.even.size(); ++v)
        for (int k = 0; k < idx.even[v]; ++k) {
          if (!firstd) os << "*";
          os << "d[" << chart_->name(chart_->even_coord(static_cast<int>(v))) << "]";
          firstd = false;
        }
      uint32_t mm = idx.odd_mask;
      while (mm) {
        int bit = std::countr_zero(mm);
        mm &= mm - 1;
        if (!firstd) os << "*";
        os << "d[" << chart_->name(chart_->odd_coord(bit)) << "]";
        firstd = false;
      }
    }
  }
  return os.str();
}

}  // namespace densalg
