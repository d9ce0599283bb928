#include <doctest.h>

#include "densalg/bv.hpp"

using namespace densalg;

namespace {

ChartPtr chart_1_1() { return Chart::make({{"x", Parity::even}, {"xi", Parity::odd}}); }
ChartPtr chart_2_2() {
  return Chart::make(
      {{"x", Parity::even}, {"y", Parity::even}, {"xi", Parity::odd}, {"eta", Parity::odd}});
}

DiffOperator d_coord(const ChartPtr& c, const std::string& name) {
  return DiffOperator::derivative(c, c->index_of(name));
}

GradedScalar coord(const ChartPtr& c, const std::string& name) {
  return GradedScalar::coordinate(c, c->index_of(name));
}

// standard odd symplectic components on a (n|n) chart with coords x.. then xi..
Bracket standard_odd_symplectic(const ChartPtr& c) {
  Bracket s = Bracket::zero(c, Parity::odd);
  int n = c->size() / 2;
  for (int i = 0; i < n; ++i) {
    s.at(i, n + i) = GradedScalar::constant(c, Rational(1));
    s.at(n + i, i) = GradedScalar::constant(c, Rational(1));
  }
  return s;
}

ExtendedBracketData flat_data(const ChartPtr& c) {
  Bracket s = standard_odd_symplectic(c);
  std::vector<GradedScalar> gamma(static_cast<size_t>(c->size()), GradedScalar(c));
  return ExtendedBracketData(s, gamma, GradedScalar(c));
}

}  // namespace

TEST_CASE("jacobi base check: flat and curved fixtures") {
  auto c = chart_1_1();
  DiffOperator dxdxi = d_coord(c, "x").compose(d_coord(c, "xi"));

  JacobiBaseCertificate flat = jacobi_check_base(dxdxi);
  CHECK(flat.order_ok);
  CHECK(flat.schouten_zero);
  CHECK(flat.agree);
  CHECK(flat.top_symbol_match);

  // arbitrary first-order parts keep the Jacobi identity: ord d^2 <= 2
  GradedScalar x = coord(c, "x");
  GradedScalar xi = coord(c, "xi");
  DiffOperator with_first = dxdxi + d_coord(c, "x").left_mult(x * xi) +
                            d_coord(c, "xi").left_mult(x * x) + DiffOperator::mult(xi);
  JacobiBaseCertificate j2 = jacobi_check_base(with_first);
  CHECK(j2.order_ok);
  CHECK(j2.schouten_zero);
  CHECK(j2.agree);
  CHECK(j2.top_symbol_match);
  CHECK(with_first.compose(with_first).order() <= 2);

  // x-dependent non-Jacobi symbol: S^{xx} = 2 x xi
  DiffOperator bad = d_coord(c, "x").compose(d_coord(c, "x")).left_mult(x * xi) + dxdxi;
  JacobiBaseCertificate j3 = jacobi_check_base(bad);
  CHECK(!j3.order_ok);
  CHECK(!j3.schouten_zero);
  CHECK(j3.agree);
  CHECK(j3.order_d2 == 3);
  CHECK(j3.top_symbol_match);  // order-3 part equals (1/2)(S,S)
}

TEST_CASE("jacobi base check agreement on random odd operators") {
  for (auto chart : {chart_1_1(), chart_2_2()}) {
    Rng rng(83);
    for (int i = 0; i < 25; ++i) {
      DiffOperator d = random_operator_of_parity(rng, chart, Parity::odd, 2, 2, 3);
      JacobiBaseCertificate cert = jacobi_check_base(d);
      CHECK(cert.agree);
      CHECK(cert.top_symbol_match);
      CHECK(d.compose(d).order() <= 3);  // odd operators: ord d^2 <= 3 always
    }
  }
}

TEST_CASE("even operators are rejected by the odd checks") {
  auto c = chart_1_1();
  DiffOperator even_op = d_coord(c, "x").compose(d_coord(c, "x"));
  CHECK_THROWS_AS(jacobi_check_base(even_op), Error);
  CHECK_THROWS_AS(flatness_check(even_op), Error);
}

TEST_CASE("flatness: three predicates agree") {
  auto c = chart_1_1();
  GradedScalar x = coord(c, "x");
  GradedScalar xi = coord(c, "xi");
  DiffOperator dxdxi = d_coord(c, "x").compose(d_coord(c, "xi"));

  FlatnessCertificate flat = flatness_check(dxdxi);
  CHECK(flat.derivation_ok);
  CHECK(flat.order_ok);
  CHECK(flat.curvature_zero);
  CHECK(flat.agree);

  // curved: drift makes (S, gamma) nonzero; all three must fail together
  DiffOperator curved = dxdxi + d_coord(c, "x").left_mult(x * xi);
  FlatnessCertificate bad = flatness_check(curved);
  CHECK(!bad.derivation_ok);
  CHECK(!bad.order_ok);
  CHECK(!bad.curvature_zero);
  CHECK(bad.agree);
  CHECK(!bad.derivation_witness.empty());

  // exact gamma: the canonical pencil of Jacobi data is always flat
  auto c2 = chart_2_2();
  Rng rng(89);
  OddPoissonStructure s(standard_odd_symplectic(c2));
  GradedScalar a_val = coord(c2, "x") * coord(c2, "xi") * coord(c2, "eta") +
                       coord(c2, "y") * coord(c2, "y");
  EffectiveAction act(a_val);
  ExtendedBracketData data = corollary_data(s, act);
  OperatorPencil p = canonical_pencil(data);
  for (Rational w : {Rational(0), Rational(1, 2), Rational(2)}) {
    FlatnessCertificate fc = flatness_check(p.specialize(w).op, 2, 6, 91);
    CHECK(fc.agree);
    CHECK(fc.derivation_ok);
  }
}

TEST_CASE("theorem 3: four equations against direct Jacobi") {
  auto c = chart_1_1();

  // flat case: everything holds
  Theorem3Certificate flat = jacobi_check_densities(flat_data(c), 10, 2, true);
  CHECK(flat.four_hold);
  CHECK(flat.jacobi_ok);
  CHECK(flat.agree);

  // third-equation counterexample: theta = xi with standard S
  {
    Bracket s = standard_odd_symplectic(c);
    std::vector<GradedScalar> gamma(2, GradedScalar(c));
    ExtendedBracketData data(s, gamma, coord(c, "xi"));
    Theorem3Certificate cert = jacobi_check_densities(data, 10, 3, true);
    CHECK(cert.eq_ss);
    CHECK(cert.eq_sgamma);
    CHECK(!cert.eq_stheta_gg);  // exactly the third equation fails
    CHECK(cert.eq_gammatheta);
    CHECK(!cert.four_hold);
    CHECK(!cert.jacobi_ok);
    CHECK(cert.agree);
  }

  // corollary data on 2|2 with (gamma,gamma) != 0, compensated by (S,theta)
  {
    auto c2 = chart_2_2();
    OddPoissonStructure s(standard_odd_symplectic(c2));
    GradedScalar a_val = coord(c2, "y") * coord(c2, "xi") * coord(c2, "eta") +
                         coord(c2, "x") * coord(c2, "y");
    ExtendedBracketData data = corollary_data(s, EffectiveAction(a_val));
    PhaseSpace ps = PhaseSpace::of(c2);
    MomentumPolynomial gamma = vector_hamiltonian(ps, data.gamma);
    CHECK(!ps.poisson(gamma, gamma).is_zero());
    Theorem3Certificate cert = jacobi_check_densities(data, 10, 5, true);
    CHECK(cert.four_hold);
    CHECK(cert.jacobi_ok);
    CHECK(cert.agree);
  }
}

TEST_CASE("theorem 3 biconditional on random data") {
  for (auto chart : {chart_1_1(), chart_2_2()}) {
    Rng rng(97);
    int held = 0, failed = 0;
    for (int i = 0; i < 20; ++i) {
      ExtendedBracketData data = random_bracket_data(rng, chart, Parity::odd, 2);
      Theorem3Certificate cert = jacobi_check_densities(data, 6, 101 + i);
      CHECK(cert.agree);
      (cert.four_hold ? held : failed)++;
    }
    CHECK(failed > 0);  // random data generically violates Jacobi
  }
}

TEST_CASE("modular field: flat and volume cases") {
  auto c = chart_1_1();
  ModularFieldResult flat = extract_modular_field(flat_data(c));
  CHECK(flat.is_zero);
  CHECK(flat.poisson_ok);
  CHECK(flat.divergence_matches_formula);

  // exact gamma with compatible theta on 1|1: X = 0 and the half-density
  // specialization squares to zero
  OddPoissonStructure s(standard_odd_symplectic(c));
  EffectiveAction act(coord(c, "x") * coord(c, "x"));
  ExtendedBracketData data = corollary_data(s, act);
  ModularFieldResult vol = extract_modular_field(data);
  CHECK(vol.is_zero);
  CHECK(vol.poisson_ok);
  DiffOperator half = canonical_pencil(data).specialize(Rational(1, 2)).op;
  CHECK(half.compose(half).is_zero());
}

TEST_CASE("modular field: nonzero case on 2|2") {
  auto c = chart_2_2();
  OddPoissonStructure s(standard_odd_symplectic(c));
  GradedScalar a_val = coord(c, "x") * coord(c, "xi") * coord(c, "eta");
  ExtendedBracketData data = corollary_data(s, EffectiveAction(a_val));
  ModularFieldResult res = extract_modular_field(data);
  bool nonzero = false;
  for (const auto& xc : res.x)
    if (!xc.is_zero()) nonzero = true;
  CHECK(nonzero);
  CHECK(res.poisson_ok);
  CHECK(res.divergence_matches_formula);
}

TEST_CASE("nondegenerate reduction") {
  auto c = chart_1_1();

  // standard symplectic, flat: zero action
  ReductionResult flat = nondegenerate_reduction(flat_data(c));
  CHECK(flat.theta_ok);
  REQUIRE(flat.action.has_value());
  CHECK(flat.action->is_zero());

  // forward then backward on polynomial actions
  for (auto chart : {chart_1_1(), chart_2_2()}) {
    OddPoissonStructure s(standard_odd_symplectic(chart));
    Rng rng(103);
    for (int i = 0; i < 10; ++i) {
      GradedScalar a_val = random_graded_scalar_of_parity(rng, chart, Parity::even, 3, 3);
      // strip the constant term: recovery is only up to a constant
      RationalFunction body = a_val.body();
      Rational c0(0);
      if (body.is_polynomial()) {
        auto it = body.num().terms().find(Monomial(chart->n_even()));
        if (it != body.num().terms().end()) c0 = it->second;
      }
      GradedScalar normalized = a_val - GradedScalar::constant(chart, c0);
      ExtendedBracketData data = corollary_data(s, EffectiveAction(normalized));
      ReductionResult res = nondegenerate_reduction(data);
      CHECK(res.theta_ok);
      REQUIRE(res.action.has_value());
      CHECK(*res.action == normalized);
      CHECK(res.potential_ok);
    }
  }

  // degenerate S is rejected
  auto c2 = chart_2_2();
  Bracket s2 = Bracket::zero(c2, Parity::odd);
  s2.at(0, 2) = GradedScalar::constant(c2, Rational(1));
  s2.at(2, 0) = GradedScalar::constant(c2, Rational(1));
  std::vector<GradedScalar> gamma(4, GradedScalar(c2));
  ExtendedBracketData degenerate(s2, gamma, GradedScalar(c2));
  CHECK_THROWS_AS(nondegenerate_reduction(degenerate), Error);
}

TEST_CASE("master equation check") {
  auto c = chart_1_1();
  OddPoissonStructure s(standard_odd_symplectic(c));

  // zero action: the standard odd Laplacian squares to zero
  MasterCertificate zero = master_equation_check(s, EffectiveAction(GradedScalar(c)),
                                                 Rational(1, 2));
  CHECK(zero.operator_route);
  CHECK(zero.scalar_route);
  CHECK(zero.agree);

  // constant action gives the same verdict
  MasterCertificate constant = master_equation_check(
      s, EffectiveAction(GradedScalar::constant(c, Rational(7))), Rational(1, 2));
  CHECK(constant.operator_route);
  CHECK(constant.agree);

  // on 1|1 every even action satisfies the master equation
  Rng rng(107);
  for (int i = 0; i < 8; ++i) {
    GradedScalar a_val = random_graded_scalar_of_parity(rng, c, Parity::even, 3, 3);
    MasterCertificate cert = master_equation_check(s, EffectiveAction(a_val), Rational(1, 2));
    CHECK(cert.operator_route);
    CHECK(cert.agree);
  }

  // engineered failure on 2|2: odd-pair action with nonzero defect
  auto c2 = chart_2_2();
  OddPoissonStructure s2(standard_odd_symplectic(c2));
  GradedScalar bad_action = coord(c2, "x") * coord(c2, "xi") * coord(c2, "eta");
  MasterCertificate fail = master_equation_check(s2, EffectiveAction(bad_action), Rational(1, 2));
  CHECK(!fail.operator_route);
  CHECK(!fail.scalar_route);
  CHECK(fail.agree);
  CHECK(!fail.scalar.is_zero());

  // verdicts agree across random actions on 2|2
  Rng rng2(109);
  for (int i = 0; i < 8; ++i) {
    GradedScalar a_val = random_graded_scalar_of_parity(rng2, c2, Parity::even, 2, 3);
    MasterCertificate cert = master_equation_check(s2, EffectiveAction(a_val), Rational(1, 2));
    CHECK(cert.agree);
  }
}
