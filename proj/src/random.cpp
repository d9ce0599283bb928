#include "densalg/random.hpp"

namespace densalg {

Polynomial random_polynomial(Rng& rng, int nvars, int max_degree, int max_terms) {
  Polynomial p(nvars);
  int terms = static_cast<int>(rng.below(static_cast<uint64_t>(max_terms))) + 1;
  for (int t = 0; t < terms; ++t) {
    Monomial m(nvars);
    int budget = static_cast<int>(rng.below(static_cast<uint64_t>(max_degree + 1)));
    for (int d = 0; d < budget && nvars > 0; ++d) {
      int v = static_cast<int>(rng.below(static_cast<uint64_t>(nvars)));
      m.set_exp(v, m.exp(v) + 1);
    }
    p.add_term(m, rng.rational());
  }
  return p;
}

GradedScalar random_graded_scalar(Rng& rng, const ChartPtr& chart, int max_degree,
                                  int max_terms) {
  GradedScalar g(chart);
  int terms = static_cast<int>(rng.below(static_cast<uint64_t>(max_terms))) + 1;
  uint32_t full = chart->n_odd() >= 32 ? ~0u : ((1u << chart->n_odd()) - 1);
  for (int t = 0; t < terms; ++t) {
    uint32_t mask = static_cast<uint32_t>(rng.next()) & full;
    Polynomial p = random_polynomial(rng, chart->n_even(), max_degree, 2);
    g = g + GradedScalar::term(chart, mask, RationalFunction::from_poly(p));
  }
  return g;
}

GradedScalar random_graded_scalar_of_parity(Rng& rng, const ChartPtr& chart, Parity p,
                                            int max_degree, int max_terms) {
  GradedScalar g = random_graded_scalar(rng, chart, max_degree, max_terms);
  GradedScalar part = g.parity_part(p);
  if (!part.is_zero()) return part;
  if (p == Parity::even) return GradedScalar::constant(chart, rng.nonzero_rational());
  if (chart->n_odd() == 0)
    throw Error(Error::Code::bad_argument, "no odd coordinates for an odd sample");
  return GradedScalar::coordinate(chart, chart->odd_coord(0)) * rng.nonzero_rational();
}

namespace {

DerivIndex random_deriv_index(Rng& rng, const ChartPtr& chart, int max_order) {
  DerivIndex idx;
  idx.even.assign(static_cast<size_t>(chart->n_even()), 0);
  int budget = static_cast<int>(rng.below(static_cast<uint64_t>(max_order + 1)));
  for (int d = 0; d < budget; ++d) {
    int coord = static_cast<int>(rng.below(static_cast<uint64_t>(chart->size())));
    if (chart->parity(coord) == Parity::even) {
      size_t v = static_cast<size_t>(chart->even_var(coord));
      idx.even[v] = static_cast<uint16_t>(idx.even[v] + 1);
    } else {
      idx.odd_mask |= 1u << chart->odd_bit(coord);
    }
  }
  return idx;
}

}  // namespace

DiffOperator random_operator(Rng& rng, const ChartPtr& chart, int max_order, int max_degree,
                             int max_terms) {
  DiffOperator d(chart);
  int terms = static_cast<int>(rng.below(static_cast<uint64_t>(max_terms))) + 1;
  for (int t = 0; t < terms; ++t) {
    DerivIndex idx = random_deriv_index(rng, chart, max_order);
    GradedScalar c = random_graded_scalar(rng, chart, max_degree, 2);
    d = d + DiffOperator::term(c, idx);
  }
  return d;
}

DiffOperator random_operator_of_parity(Rng& rng, const ChartPtr& chart, Parity p, int max_order,
                                       int max_degree, int max_terms) {
  DiffOperator d(chart);
  int terms = static_cast<int>(rng.below(static_cast<uint64_t>(max_terms))) + 1;
  for (int t = 0; t < terms; ++t) {
    DerivIndex idx = random_deriv_index(rng, chart, max_order);
    Parity coeff_parity = parity_add(p, static_cast<Parity>(idx.odd_count() & 1));
    GradedScalar c = random_graded_scalar_of_parity(rng, chart, coeff_parity, max_degree, 2);
    d = d + DiffOperator::term(c, idx);
  }
  return d;
}

ExtendedBracketData random_bracket_data(Rng& rng, const ChartPtr& chart, Parity parity,
                                        int max_degree) {
  int n = chart->size();
  Bracket s = Bracket::zero(chart, parity);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      int ab = parity_bit(chart->parity(a)) & parity_bit(chart->parity(b));
      if (a == b && ab) continue;  // odd diagonal vanishes by graded symmetry
      Parity need = parity_add(parity, parity_add(chart->parity(a), chart->parity(b)));
      GradedScalar e = random_graded_scalar_of_parity(rng, chart, need, max_degree, 2);
      s.at(a, b) = e;
      if (a != b) s.at(b, a) = ab ? -e : e;
    }
  }
  std::vector<GradedScalar> gamma;
  for (int a = 0; a < n; ++a)
    gamma.push_back(random_graded_scalar_of_parity(
        rng, chart, parity_add(parity, chart->parity(a)), max_degree, 2));
  GradedScalar theta = random_graded_scalar_of_parity(rng, chart, parity, max_degree, 2);
  return ExtendedBracketData(std::move(s), std::move(gamma), std::move(theta));
}

}  // namespace densalg
