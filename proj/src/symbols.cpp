#include "densalg/symbols.hpp"

namespace densalg {

Bracket Bracket::zero(ChartPtr chart, Parity parity) {
  Bracket b;
  b.chart = chart;
  b.parity = parity;
  int n = chart->size();
  b.s.assign(static_cast<size_t>(n),
             std::vector<GradedScalar>(static_cast<size_t>(n), GradedScalar(chart)));
  return b;
}

GradedScalar Bracket::evaluate(const GradedScalar& f, const GradedScalar& g) const {
  require_same_chart(chart, f.chart());
  require_same_chart(chart, g.chart());
  GradedScalar out(chart);
  int n = chart->size();
  for (Parity fp : {Parity::even, Parity::odd}) {
    GradedScalar fpart = f.parity_part(fp);
    if (fpart.is_zero()) continue;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (at(a, b).is_zero()) continue;
        GradedScalar t = at(a, b) * fpart.partial(b) * g.partial(a);
        if (parity_bit(chart->parity(a)) && parity_bit(fp)) t = -t;
        out = out + t;
      }
    }
  }
  return out;
}

void Bracket::validate() const {
  int n = chart->size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Parity expect = parity_add(parity, parity_add(chart->parity(a), chart->parity(b)));
      if (!at(a, b).is_homogeneous(expect))
        throw Error(Error::Code::parity_mismatch,
                    "bracket component (" + chart->name(a) + "," + chart->name(b) +
                        ") has wrong parity");
      int ab = parity_bit(chart->parity(a)) & parity_bit(chart->parity(b));
      GradedScalar sym = ab ? -at(b, a) : at(b, a);
      if (!(at(a, b) == sym))
        throw Error(Error::Code::bad_argument,
                    "bracket components are not graded-symmetric at (" + chart->name(a) + "," +
                        chart->name(b) + ")");
    }
}

GradedScalar operator_bracket(const DiffOperator& d, const GradedScalar& f,
                              const GradedScalar& g) {
  require_same_chart(d.chart(), f.chart());
  require_same_chart(d.chart(), g.chart());
  auto eps = d.parity();
  if (!eps.has_value())
    throw Error(Error::Code::parity_mismatch, "operator bracket needs a homogeneous operator");
  GradedScalar out(d.chart());
  GradedScalar d1 = d.apply(GradedScalar::constant(d.chart(), Rational(1)));
  for (Parity fp : {Parity::even, Parity::odd}) {
    GradedScalar fpart = f.parity_part(fp);
    if (fpart.is_zero()) continue;
    GradedScalar t = d.apply(fpart * g) - d.apply(fpart) * g + d1 * fpart * g;
    GradedScalar last = fpart * d.apply(g);
    if (parity_bit(*eps) && parity_bit(fp)) last = -last;
    out = out + t - last;
  }
  return out;
}

namespace {

// search a bi-derivation violation for the error message
std::string find_biderivation_witness(const DiffOperator& d) {
  const ChartPtr& chart = d.chart();
  auto eps = d.parity();
  if (!eps.has_value()) return "operator is not parity homogeneous";
  std::vector<GradedScalar> probes;
  for (int i = 0; i < chart->size(); ++i) {
    probes.push_back(GradedScalar::coordinate(chart, i));
    for (int j = i; j < chart->size(); ++j)
      probes.push_back(GradedScalar::coordinate(chart, i) * GradedScalar::coordinate(chart, j));
  }
  for (const auto& f : probes)
    for (const auto& g : probes)
      for (const auto& h : probes) {
        GradedScalar lhs = operator_bracket(d, f, g * h);
        auto fp = f.parity();
        auto gp = g.parity();
        if (!fp || !gp) continue;
        GradedScalar second = g * operator_bracket(d, f, h);
        if (parity_bit(parity_add(*fp, *eps)) && parity_bit(*gp)) second = -second;
        GradedScalar rhs = operator_bracket(d, f, g) * h + second;
        if (!(lhs == rhs))
          return "witness: f=" + f.to_string() + ", g=" + g.to_string() + ", h=" + h.to_string();
      }
  return "no low-degree witness found";
}

}  // namespace

Bracket bracket_from_operator(const DiffOperator& d) {
  const ChartPtr& chart = d.chart();
  if (d.order() > 2)
    throw Error(Error::Code::order_too_high,
                "operator of order > 2 does not generate a bi-derivation; " +
                    find_biderivation_witness(d));
  auto eps = d.parity();
  if (!eps.has_value())
    throw Error(Error::Code::parity_mismatch, "bracket extraction needs a homogeneous operator");
  Bracket br = Bracket::zero(chart, *eps);
  int n = chart->size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      GradedScalar v = operator_bracket(d, GradedScalar::coordinate(chart, b),
                                        GradedScalar::coordinate(chart, a));
      if (parity_bit(chart->parity(a)) && parity_bit(chart->parity(b))) v = -v;
      br.at(a, b) = v;
    }
  return br;
}

MomentumPolynomial bracket_hamiltonian(const PhaseSpace& ps, const Bracket& b) {
  MomentumPolynomial out(ps.extended());
  int n = ps.base()->size();
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb) {
      if (b.at(a, bb).is_zero()) continue;
      out = out + ps.lift(b.at(a, bb)) * ps.momentum(bb) * ps.momentum(a);
    }
  return out * Rational(1, 2);
}

MomentumPolynomial principal_symbol(const DiffOperator& d) {
  PhaseSpace ps = PhaseSpace::of(d.chart());
  return bracket_hamiltonian(ps, bracket_from_operator(d));
}

std::vector<GradedScalar> subprincipal_components(const DiffOperator& d) {
  const ChartPtr& chart = d.chart();
  if (d.order() > 2)
    throw Error(Error::Code::order_too_high, "subprincipal symbol needs order <= 2");
  auto eps = d.parity();
  if (!eps.has_value())
    throw Error(Error::Code::parity_mismatch, "subprincipal symbol needs a homogeneous operator");
  Bracket s = bracket_from_operator(d);
  int n = chart->size();
  std::vector<GradedScalar> gamma;
  for (int a = 0; a < n; ++a) {
    GradedScalar acc(chart);
    for (int b = 0; b < n; ++b) {
      GradedScalar t = s.at(b, a).partial(b);
      // (-1)^{b~ (eps+1)}
      if (parity_bit(chart->parity(b)) && !parity_bit(*eps)) t = -t;
      acc = acc + t;
    }
    // T^a: first-order coefficient of d at coordinate a
    DerivIndex idx;
    idx.even.assign(static_cast<size_t>(chart->n_even()), 0);
    if (chart->parity(a) == Parity::even)
      idx.even[static_cast<size_t>(chart->even_var(a))] = 1;
    else
      idx.odd_mask = 1u << chart->odd_bit(a);
    acc = acc - d.coefficient(idx) * Rational(2);
    gamma.push_back(acc);
  }
  return gamma;
}

MomentumPolynomial gamma_hamiltonian(const PhaseSpace& ps,
                                     const std::vector<GradedScalar>& gamma) {
  MomentumPolynomial out(ps.extended());
  for (int a = 0; a < ps.base()->size(); ++a)
    out = out + ps.lift(gamma[static_cast<size_t>(a)]) * ps.momentum(a);
  return out;
}

MomentumPolynomial vector_hamiltonian(const PhaseSpace& ps,
                                      const std::vector<GradedScalar>& components) {
  MomentumPolynomial out(ps.extended());
  const ChartPtr& base = ps.base();
  for (int a = 0; a < base->size(); ++a) {
    MomentumPolynomial t = ps.lift(components[static_cast<size_t>(a)]) * ps.momentum(a);
    if (parity_bit(base->parity(a)) == 0) t = -t;
    out = out + t;
  }
  return out;
}

MomentumPolynomial subprincipal_symbol(const DiffOperator& d) {
  PhaseSpace ps = PhaseSpace::of(d.chart());
  return gamma_hamiltonian(ps, subprincipal_components(d));
}

ConnectionLawCertificate verify_connection_law(const DiffOperator& d,
                                               const CoordinateChange& change) {
  if (d.chart() != change.target())
    throw Error(Error::Code::chart_mismatch, "operator must live over the target chart");
  const ChartPtr& src = change.source();
  int n = src->size();

  std::vector<GradedScalar> gamma_target = subprincipal_components(d);

  DiffOperator dpb = d.pullback(change);
  std::vector<GradedScalar> gamma_source = subprincipal_components(dpb);
  Bracket s_source = bracket_from_operator(dpb);

  const GradedScalar& J = change.jacobian_berezinian();
  GradedScalar Jinv = J.inverse();
  std::vector<GradedScalar> dlnJ;
  for (int b = 0; b < n; ++b) dlnJ.push_back(J.partial(b) * Jinv);

  ConnectionLawCertificate cert;
  cert.equal = true;
  for (int ap = 0; ap < change.target()->size(); ++ap) {
    GradedScalar lhs = change.pullback(gamma_target[static_cast<size_t>(ap)]);
    GradedScalar rhs(src);
    for (int a = 0; a < n; ++a) {
      GradedScalar inner = gamma_source[static_cast<size_t>(a)];
      for (int b = 0; b < n; ++b)
        inner = inner + s_source.at(a, b) * dlnJ[static_cast<size_t>(b)];
      rhs = rhs + inner * change.jacobian().at(ap, a);
    }
    GradedScalar diff = lhs - rhs;
    if (!diff.is_zero()) cert.equal = false;
    cert.lhs.push_back(lhs);
    cert.rhs.push_back(rhs);
    cert.difference.push_back(diff);
  }
  return cert;
}

CurvatureResult curvature(const PhaseSpace& ps, const MomentumPolynomial& s,
                          const MomentumPolynomial& gamma) {
  CurvatureResult r{MomentumPolynomial(ps.extended()), false, MomentumPolynomial(ps.extended())};
  r.jacobi_defect = ps.poisson(s, s);
  r.jacobi_ok = r.jacobi_defect.is_zero();
  r.f = ps.poisson(s, gamma);
  return r;
}

std::vector<GradedScalar> upper_connection_derivative(const Bracket& s,
                                                      const std::vector<GradedScalar>& gamma,
                                                      const GradedScalar& rho) {
  const ChartPtr& chart = s.chart;
  require_same_chart(chart, rho.chart());
  int n = chart->size();
  std::vector<GradedScalar> out;
  for (int a = 0; a < n; ++a) {
    GradedScalar acc = gamma[static_cast<size_t>(a)] * rho;
    for (int b = 0; b < n; ++b) acc = acc + s.at(a, b) * rho.partial(b);
    out.push_back(acc);
  }
  return out;
}

}  // namespace densalg
