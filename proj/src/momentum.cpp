#include "densalg/momentum.hpp"

namespace densalg {

PhaseSpace PhaseSpace::of(const ChartPtr& base) {
  std::vector<std::pair<std::string, Parity>> coords;
  for (int i = 0; i < base->size(); ++i) coords.push_back({base->name(i), base->parity(i)});
  for (int i = 0; i < base->size(); ++i)
    coords.push_back({"p[" + base->name(i) + "]", base->parity(i)});
  return PhaseSpace(base, Chart::make(coords));
}

MomentumPolynomial PhaseSpace::lift(const GradedScalar& f) const {
  require_same_chart(f.chart(), base_);
  // base coordinates come first in the extended chart, so even-variable
  // indices and odd bits carry over unchanged
  std::vector<GradedScalar> images;
  for (int i = 0; i < base_->size(); ++i)
    images.push_back(GradedScalar::coordinate(extended_, i));
  return f.substitute(images, extended_);
}

bool PhaseSpace::is_momentum_free(const MomentumPolynomial& f) const {
  require_same_chart(f.chart(), extended_);
  int base_even = base_->n_even();
  int base_odd = base_->n_odd();
  uint32_t momentum_bits = ~((1u << base_odd) - 1);
  for (const auto& [mask, c] : f.terms()) {
    if (mask & momentum_bits) return false;
    for (int v = base_even; v < extended_->n_even(); ++v)
      if (c.num().depends_on(v) || c.den().depends_on(v)) return false;
  }
  return true;
}

GradedScalar PhaseSpace::drop(const MomentumPolynomial& f) const {
  if (!is_momentum_free(f))
    throw Error(Error::Code::bad_argument, "value depends on momenta");
  GradedScalar out(base_);
  int nb = base_->n_even();
  auto shrink = [&](const Polynomial& p) {
    Polynomial q(nb);
    for (const auto& [m, c] : p.terms()) {
      Monomial mm(nb);
      for (int v = 0; v < nb; ++v) mm.set_exp(v, m.exp(v));
      q.add_term(mm, c);
    }
    return q;
  };
  for (const auto& [mask, c] : f.terms()) {
    RationalFunction rf(shrink(c.num()), shrink(c.den()));
    out = out + GradedScalar::term(base_, mask, rf);
  }
  return out;
}

int PhaseSpace::momentum_degree(const MomentumPolynomial& f) const {
  require_same_chart(f.chart(), extended_);
  int deg = 0;
  int base_odd = base_->n_odd();
  for (const auto& [mask, c] : f.terms()) {
    int odd_p = std::popcount(mask >> base_odd);
    int even_p = 0;
    for (const auto& [m, k] : c.num().terms()) {
      int d = 0;
      for (int v = base_->n_even(); v < extended_->n_even(); ++v) d += m.exp(v);
      even_p = std::max(even_p, d);
    }
    deg = std::max(deg, odd_p + even_p);
  }
  return deg;
}

MomentumPolynomial PhaseSpace::momentum_part(const MomentumPolynomial& f, int degree) const {
  require_same_chart(f.chart(), extended_);
  MomentumPolynomial out(extended_);
  int base_odd = base_->n_odd();
  for (const auto& [mask, c] : f.terms()) {
    int odd_p = std::popcount(mask >> base_odd);
    Polynomial keep(c.num().nvars());
    for (const auto& [m, k] : c.num().terms()) {
      int d = 0;
      for (int v = base_->n_even(); v < extended_->n_even(); ++v) d += m.exp(v);
      if (odd_p + d == degree) keep.add_term(m, k);
    }
    if (keep.is_zero()) continue;
    out = out + GradedScalar::term(extended_, mask, RationalFunction(keep, c.den()));
  }
  return out;
}

void PhaseSpace::validate(const MomentumPolynomial& f) const {
  require_same_chart(f.chart(), extended_);
  for (const auto& [mask, c] : f.terms()) {
    for (int v = base_->n_even(); v < extended_->n_even(); ++v)
      if (c.den().depends_on(v))
        throw Error(Error::Code::bad_argument, "momentum appears in a denominator");
  }
  if (momentum_degree(f) > 4)
    throw Error(Error::Code::order_too_high, "momentum degree exceeds the supported cap of 4");
}

MomentumPolynomial PhaseSpace::poisson(const MomentumPolynomial& f,
                                       const MomentumPolynomial& g) const {
  require_same_chart(f.chart(), extended_);
  require_same_chart(g.chart(), extended_);
  MomentumPolynomial out(extended_);
  for (Parity fp : {Parity::even, Parity::odd}) {
    MomentumPolynomial fpart = f.parity_part(fp);
    if (fpart.is_zero()) continue;
    int fbit = parity_bit(fp);
    for (int a = 0; a < base_->size(); ++a) {
      int abit = parity_bit(base_->parity(a));
      MomentumPolynomial dfx = fpart.partial(a);
      MomentumPolynomial dgp = g.partial(momentum_coord(a));
      MomentumPolynomial dfp = fpart.partial(momentum_coord(a));
      MomentumPolynomial dgx = g.partial(a);
      MomentumPolynomial t1 = dfx * dgp;
      if (abit && !(fbit)) t1 = -t1;  // (-1)^{a~ (f~+1)}
      MomentumPolynomial t2 = dfp * dgx;
      if (abit && fbit) t2 = -t2;  // (-1)^{a~ f~}
      out = out + t1 - t2;
    }
  }
  return out;
}

}  // namespace densalg
