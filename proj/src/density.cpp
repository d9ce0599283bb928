#include "densalg/density.hpp"

namespace densalg {

DensityElement DensityElement::pure(const Rational& weight, const GradedScalar& coeff) {
  DensityElement d(coeff.chart());
  d.add(weight, coeff);
  return d;
}

void DensityElement::add(const Rational& w, const GradedScalar& g) {
  if (g.is_zero()) return;
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    terms_.emplace(w, g);
  } else {
    GradedScalar s = it->second + g;
    if (s.is_zero())
      terms_.erase(it);
    else
      it->second = std::move(s);
  }
}

GradedScalar DensityElement::coefficient(const Rational& weight) const {
  auto it = terms_.find(weight);
  if (it == terms_.end()) return GradedScalar(chart_);
  return it->second;
}

std::optional<Rational> DensityElement::pure_weight() const {
  if (terms_.size() != 1) return std::nullopt;
  return terms_.begin()->first;
}

DensityElement DensityElement::operator-() const {
  DensityElement d(chart_);
  for (const auto& [w, g] : terms_) d.terms_.emplace(w, -g);
  return d;
}

DensityElement DensityElement::operator+(const DensityElement& o) const {
  require_same_chart(chart_, o.chart_);
  DensityElement d = *this;
  for (const auto& [w, g] : o.terms_) d.add(w, g);
  return d;
}

DensityElement DensityElement::operator-(const DensityElement& o) const {
  require_same_chart(chart_, o.chart_);
  DensityElement d = *this;
  for (const auto& [w, g] : o.terms_) d.add(w, -g);
  return d;
}

DensityElement DensityElement::operator*(const DensityElement& o) const {
  require_same_chart(chart_, o.chart_);
  DensityElement d(chart_);
  for (const auto& [u, f] : terms_)
    for (const auto& [v, g] : o.terms_) d.add(u + v, f * g);
  return d;
}

DensityElement DensityElement::operator*(const Rational& c) const {
  DensityElement d(chart_);
  if (c == 0) return d;
  for (const auto& [w, g] : terms_) d.terms_.emplace(w, g * c);
  return d;
}

std::vector<std::pair<Rational, GradedScalar>> DensityElement::weight_decompose() const {
  std::vector<std::pair<Rational, GradedScalar>> out;
  for (const auto& [w, g] : terms_) out.emplace_back(w, g);
  return out;
}

ExtendedBracketData::ExtendedBracketData(Bracket s_, std::vector<GradedScalar> gamma_,
                                         GradedScalar theta_)
    : s(std::move(s_)), gamma(std::move(gamma_)), theta(std::move(theta_)) {
  if (static_cast<int>(gamma.size()) != s.chart->size())
    throw Error(Error::Code::bad_argument, "one gamma component per coordinate required");
  for (const auto& g : gamma) require_same_chart(g.chart(), s.chart);
  require_same_chart(theta.chart(), s.chart);
}

void ExtendedBracketData::validate() const {
  s.validate();
  const ChartPtr& c = s.chart;
  for (int a = 0; a < c->size(); ++a)
    if (!gamma[static_cast<size_t>(a)].is_homogeneous(parity_add(s.parity, c->parity(a))))
      throw Error(Error::Code::parity_mismatch,
                  "gamma component " + c->name(a) + " has wrong parity");
  if (!theta.is_homogeneous(s.parity))
    throw Error(Error::Code::parity_mismatch, "theta has wrong parity");
}

DensityElement densities_bracket(const ExtendedBracketData& data, const DensityElement& a,
                                 const DensityElement& b) {
  const ChartPtr& chart = data.chart();
  require_same_chart(chart, a.chart());
  require_same_chart(chart, b.chart());
  int n = chart->size();
  DensityElement out(chart);
  for (const auto& [u, psi] : a.terms()) {
    for (Parity pp : {Parity::even, Parity::odd}) {
      GradedScalar psip = psi.parity_part(pp);
      if (psip.is_zero()) continue;
      int pbit = parity_bit(pp);
      for (const auto& [v, chi] : b.terms()) {
        GradedScalar acc(chart);
        for (int aa = 0; aa < n; ++aa) {
          int abit = parity_bit(chart->parity(aa));
          // base-bracket part
          for (int bb = 0; bb < n; ++bb) {
            if (data.s.at(aa, bb).is_zero()) continue;
            GradedScalar t = data.s.at(aa, bb) * psip.partial(bb) * chi.partial(aa);
            if (abit & pbit) t = -t;
            acc = acc + t;
          }
          const GradedScalar& ga = data.gamma[static_cast<size_t>(aa)];
          if (!ga.is_zero()) {
            // S^{a t} d_t psi d_a chi (-1)^{a~ psi~}
            GradedScalar t1 = ga * psip * chi.partial(aa) * u;
            if (abit & pbit) t1 = -t1;
            // S^{t a} d_a psi d_t chi (t is even: no sign)
            GradedScalar t2 = ga * psip.partial(aa) * chi * v;
            acc = acc + t1 + t2;
          }
        }
        // S^{t t} = t^2 theta
        acc = acc + data.theta * psip * chi * (u * v);
        out = out + DensityElement::pure(u + v, acc);
      }
    }
  }
  return out;
}

ScalarProduct dens_scalar_product(const DensityElement& a, const DensityElement& b) {
  require_same_chart(a.chart(), b.chart());
  const ChartPtr& chart = a.chart();
  GradedScalar integrand(chart);
  for (const auto& [w, psi] : a.terms()) {
    GradedScalar chi = b.coefficient(Rational(1) - w);
    if (chi.is_zero()) continue;
    integrand = integrand + psi * chi;
  }
  ScalarProduct sp{integrand, std::nullopt};
  if (chart->n_even() == 0) sp.berezin_value = berezin_integral(integrand);
  return sp;
}

}  // namespace densalg
