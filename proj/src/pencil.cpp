#include "densalg/pencil.hpp"

namespace densalg {

OperatorPencil::OperatorPencil(DiffOperator delta0_, DiffOperator a_, DiffOperator b_)
    : chart(delta0_.chart()), delta0(std::move(delta0_)), a(std::move(a_)), b(std::move(b_)) {
  require_same_chart(chart, a.chart());
  require_same_chart(chart, b.chart());
  if (delta0.order() > 2 || a.order() > 1 || b.order() > 0)
    throw Error(Error::Code::order_too_high, "pencil parts must have orders <= 2, 1, 0");
}

WeightedOperator OperatorPencil::specialize(const Rational& w) const {
  return WeightedOperator{delta0 + a * w + b * (w * w), w};
}

OperatorPencil canonical_pencil(const ExtendedBracketData& data) {
  data.validate();
  const ChartPtr& chart = data.chart();
  int n = chart->size();
  int eps = parity_bit(data.parity());

  DiffOperator second(chart);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (data.s.at(a, b).is_zero()) continue;
      second = second + DiffOperator::mult(data.s.at(a, b))
                            .compose(DiffOperator::derivative(chart, b))
                            .compose(DiffOperator::derivative(chart, a));
    }

  DiffOperator div_s(chart);  // sum_a (d_b S^{ba} (-1)^{b~(eps+1)}) d_a
  for (int a = 0; a < n; ++a) {
    GradedScalar acc(chart);
    for (int b = 0; b < n; ++b) {
      GradedScalar t = data.s.at(b, a).partial(b);
      if (parity_bit(chart->parity(b)) && !eps) t = -t;
      acc = acc + t;
    }
    div_s = div_s + DiffOperator::mult(acc).compose(DiffOperator::derivative(chart, a));
  }

  DiffOperator gamma_d(chart);  // gamma^a d_a
  for (int a = 0; a < n; ++a)
    gamma_d = gamma_d + DiffOperator::mult(data.gamma[static_cast<size_t>(a)])
                            .compose(DiffOperator::derivative(chart, a));

  GradedScalar div_gamma(chart);  // d_a gamma^a (-1)^{a~(eps+1)}
  for (int a = 0; a < n; ++a) {
    GradedScalar t = data.gamma[static_cast<size_t>(a)].partial(a);
    if (parity_bit(chart->parity(a)) && !eps) t = -t;
    div_gamma = div_gamma + t;
  }

  Rational half(1, 2);
  DiffOperator delta0 = (second + div_s - gamma_d) * half;
  DiffOperator a_part =
      gamma_d + DiffOperator::mult(div_gamma) * half - DiffOperator::mult(data.theta) * half;
  DiffOperator b_part = DiffOperator::mult(data.theta) * half;
  return OperatorPencil(delta0, a_part, b_part);
}

SelfAdjointCertificate check_selfadjoint(const OperatorPencil& p,
                                         const std::vector<Rational>& probes) {
  SelfAdjointCertificate cert;
  cert.probes = probes;
  cert.pass = true;
  for (const Rational& w : probes) {
    WeightedOperator dw = p.specialize(w);
    DiffOperator adj = formal_adjoint(dw).op;
    DiffOperator defect = adj - p.specialize(Rational(1) - w).op;
    if (!defect.is_zero()) cert.pass = false;
    cert.defects.push_back(defect);
  }
  return cert;
}

ExtendedBracketData pencil_from_operator(const DiffOperator& d, const Rational& w0) {
  if (w0 == 0 || w0 == Rational(1, 2) || w0 == 1)
    throw Error(Error::Code::singular_weight,
                "weight " + rational_str(w0) + " is singular; need w0 outside {0, 1/2, 1}");
  if (d.order() > 2)
    throw Error(Error::Code::order_too_high, "pencil recovery needs an operator of order <= 2");
  const ChartPtr& chart = d.chart();
  int n = chart->size();
  auto eps_opt = d.parity();
  if (!eps_opt.has_value())
    throw Error(Error::Code::parity_mismatch, "pencil recovery needs a homogeneous operator");
  int eps = parity_bit(*eps_opt);

  Bracket s = bracket_from_operator(d);

  // gamma^a = (2 T^a - d_b S^{ba} (-1)^{b~(eps+1)}) / (2 w0 - 1)
  Rational denom1 = Rational(2) * w0 - 1;
  std::vector<GradedScalar> gamma;
  for (int a = 0; a < n; ++a) {
    GradedScalar div(chart);
    for (int b = 0; b < n; ++b) {
      GradedScalar t = s.at(b, a).partial(b);
      if (parity_bit(chart->parity(b)) && !eps) t = -t;
      div = div + t;
    }
    DerivIndex idx;
    idx.even.assign(static_cast<size_t>(chart->n_even()), 0);
    if (chart->parity(a) == Parity::even)
      idx.even[static_cast<size_t>(chart->even_var(a))] = 1;
    else
      idx.odd_mask = 1u << chart->odd_bit(a);
    GradedScalar t_a = d.coefficient(idx);
    gamma.push_back((t_a * Rational(2) - div) * rational_inverse(denom1));
  }

  // R = (1/2)(w0 d_a gamma^a (-1)^{a~(eps+1)} + w0 (w0-1) theta)
  GradedScalar div_gamma(chart);
  for (int a = 0; a < n; ++a) {
    GradedScalar t = gamma[static_cast<size_t>(a)].partial(a);
    if (parity_bit(chart->parity(a)) && !eps) t = -t;
    div_gamma = div_gamma + t;
  }
  GradedScalar r = d.constant_term();
  Rational denom2 = w0 * (w0 - 1);
  GradedScalar theta = (r * Rational(2) - div_gamma * w0) * rational_inverse(denom2);

  return ExtendedBracketData(std::move(s), std::move(gamma), std::move(theta));
}

DiffOperator weighted_pullback(const DiffOperator& op, const Rational& w,
                               const CoordinateChange& change) {
  DiffOperator plain = op.pullback(change);
  if (w == 0) return plain;
  const ChartPtr& src = change.source();
  const GradedScalar& j = change.jacobian_berezinian();
  GradedScalar jinv = j.inverse();
  std::vector<GradedScalar> lambda;
  for (int a = 0; a < src->size(); ++a) lambda.push_back(j.partial(a) * jinv * (-w));
  return twist_derivatives(plain, lambda);
}

OperatorPencil pencil_pullback(const OperatorPencil& p, const CoordinateChange& change) {
  // the transported family is exactly quadratic in w; reconstruct from
  // probes 0, 1, -1
  DiffOperator t0 = weighted_pullback(p.specialize(Rational(0)).op, Rational(0), change);
  DiffOperator t1 = weighted_pullback(p.specialize(Rational(1)).op, Rational(1), change);
  DiffOperator tm1 = weighted_pullback(p.specialize(Rational(-1)).op, Rational(-1), change);
  Rational half(1, 2);
  DiffOperator a = (t1 - tm1) * half;
  DiffOperator b = (t1 + tm1) * half - t0;
  return OperatorPencil(t0, a, b);
}

}  // namespace densalg
