#include <doctest.h>

#include "densalg/checks.hpp"
#include "densalg/random.hpp"

using namespace densalg;

namespace {

ChartPtr chart_1_1() { return Chart::make({{"x", Parity::even}, {"xi", Parity::odd}}); }
ChartPtr chart_2_2() {
  return Chart::make(
      {{"x", Parity::even}, {"y", Parity::even}, {"xi", Parity::odd}, {"eta", Parity::odd}});
}

}  // namespace

TEST_CASE("expression parsing basics") {
  auto c = chart_1_1();
  GradedScalar x = GradedScalar::coordinate(c, 0);
  GradedScalar xi = GradedScalar::coordinate(c, 1);

  CHECK(eval_scalar(parse_expression("3/2"), c) == GradedScalar::constant(c, Rational(3, 2)));
  CHECK(eval_scalar(parse_expression("x^2 - 1"), c) ==
        x * x - GradedScalar::constant(c, Rational(1)));
  CHECK(eval_scalar(parse_expression("1/x"), c) == x.inverse());
  CHECK(eval_scalar(parse_expression("-x*xi"), c) == -(x * xi));
  CHECK(eval_scalar(parse_expression("x^(-2)"), c) == x.pow(-2));

  DiffOperator d = eval_operator(parse_expression("(1/2)*d[x]*d[x] + x*d[x] + 1"), c);
  DiffOperator expect = DiffOperator::derivative(c, 0).pow(2) * Rational(1, 2) +
                        DiffOperator::derivative(c, 0).left_mult(x) + DiffOperator::identity(c);
  CHECK(d == expect);

  PhaseSpace ps = PhaseSpace::of(c);
  CHECK(eval_momentum(parse_expression("p[x]*p[xi]"), ps) == ps.momentum(0) * ps.momentum(1));

  DensityElement dens = eval_density(parse_expression("t^{1/2} * (x + xi)"), c);
  CHECK(dens == DensityElement::pure(Rational(1, 2), x + xi));
  CHECK(eval_density(parse_expression("t^(-1)*x"), c) ==
        DensityElement::pure(Rational(-1), x));

  CHECK_THROWS_AS(parse_expression("x + "), Error);
  CHECK_THROWS_AS(parse_expression("(x"), Error);
  CHECK_THROWS_AS(eval_scalar(parse_expression("zz"), c), Error);
  CHECK_THROWS_AS(eval_scalar(parse_expression("d[x]"), c), Error);
  CHECK_THROWS_AS(eval_scalar(parse_expression("1/xi"), c), Error);
}

TEST_CASE("print/parse round trips (randomized)") {
  for (auto chart : {chart_1_1(), chart_2_2()}) {
    Rng rng(211);
    PhaseSpace ps = PhaseSpace::of(chart);
    for (int i = 0; i < 60; ++i) {
      GradedScalar g = random_graded_scalar(rng, chart, 3, 4);
      CHECK(eval_scalar(parse_expression(print_scalar(g)), chart) == g);

      DiffOperator d = random_operator(rng, chart, 2, 2, 3);
      CHECK(eval_operator(parse_expression(print_operator(d)), chart) == d);

      MomentumPolynomial mp = random_graded_scalar(rng, ps.extended(), 2, 3);
      CHECK(eval_momentum(parse_expression(print_momentum(mp)), ps) == mp);

      DensityElement dd(chart);
      for (int k = 0; k < 2; ++k)
        dd = dd + DensityElement::pure(Rational(rng.range(-2, 3), rng.range(1, 2)),
                                       random_graded_scalar(rng, chart, 2, 2));
      CHECK(eval_density(parse_expression(print_density(dd)), chart) == dd);
    }
  }

  // rational functions with denominators round-trip too
  auto c = chart_1_1();
  GradedScalar x = GradedScalar::coordinate(c, 0);
  GradedScalar g = (x + GradedScalar::constant(c, Rational(1))).inverse() * Rational(3, 7) +
                   GradedScalar::coordinate(c, 1) * x.inverse();
  CHECK(eval_scalar(parse_expression(print_scalar(g)), c) == g);
}

TEST_CASE("manifest parsing and diagnostics") {
  // minimal manifest
  ManifestParse good = parse_manifest(
      "# tiny fixture\n"
      "chart C even(x) odd(xi)\n"
      "operator delta on C = d[x]*d[xi]\n");
  REQUIRE(good.ok);
  CHECK(good.manifest.charts.size() == 1);
  CHECK(good.manifest.operators.size() == 1);
  auto c = good.manifest.charts.at("C");
  CHECK(good.manifest.operators.at("delta") ==
        DiffOperator::derivative(c, 0).compose(DiffOperator::derivative(c, 1)));

  // undeclared coordinate: positioned diagnostic
  ManifestParse bad = parse_manifest(
      "chart C even(x) odd(xi)\n"
      "scalar f on C = x + zz\n");
  REQUIRE(!bad.ok);
  REQUIRE(bad.diagnostics.size() == 1);
  CHECK(bad.diagnostics[0].line == 2);
  CHECK(bad.diagnostics[0].message.find("zz") != std::string::npos);

  // odd coefficient on an even S slot: parity diagnostic
  ManifestParse parity_bad = parse_manifest(
      "chart C even(x) odd(xi)\n"
      "bracketdata B on C parity odd : S[x][xi] = xi ; theta = xi\n");
  REQUIRE(!parity_bad.ok);
  CHECK(parity_bad.diagnostics[0].line == 2);
  CHECK(parity_bad.diagnostics[0].message.find("parity") != std::string::npos);

  // graded symmetry auto-fill: S[x][xi] given, S[xi][x] inferred
  ManifestParse sym = parse_manifest(
      "chart C even(x) odd(xi)\n"
      "bracketdata B on C parity odd : S[x][xi] = 1 ; theta = xi\n");
  REQUIRE(sym.ok);
  const ExtendedBracketData& d = sym.manifest.bracket_data.at("B");
  CHECK(d.s.at(1, 0) == GradedScalar::constant(sym.manifest.charts.at("C"), Rational(1)));
}

TEST_CASE("manifest print/parse round trip") {
  std::string text =
      "seed 7\n"
      "chart C even(x, y) odd(xi, eta)\n"
      "scalar f on C = x^2 + xi*eta\n"
      "operator delta on C = d[x]*d[xi] + x*d[x]\n"
      "momentum H on C = p[x]*p[xi]\n"
      "density r on C = t^(1/2)*(x + xi) + t^2*(y)\n"
      "chart D even(u) odd(mu)\n"
      "chart E even(x2) odd(mu2)\n"
      "change phi from E to D : u = x2^3 ; mu = mu2\n"
      "bracketdata B on C parity odd : S[x][xi] = 1 ; S[y][eta] = 1 ; gamma[xi] = x ; theta = xi\n"
      "check theorem3 data=B\n"
      "check equal lhs=f rhs=f\n";
  ManifestParse p1 = parse_manifest(text);
  REQUIRE(p1.ok);
  std::string printed = print_manifest(p1.manifest);
  ManifestParse p2 = parse_manifest(printed);
  REQUIRE(p2.ok);
  CHECK(print_manifest(p2.manifest) == printed);
  // semantic round trip of the objects
  CHECK(p2.manifest.scalars.at("f") == p1.manifest.scalars.at("f"));
  CHECK(p2.manifest.operators.at("delta") == p1.manifest.operators.at("delta"));
  CHECK(p2.manifest.densities.at("r") == p1.manifest.densities.at("r"));
  CHECK(p2.manifest.bracket_data.at("B") == p1.manifest.bracket_data.at("B"));
}

TEST_CASE("run_checks verdicts and determinism") {
  std::string text =
      "seed 3\n"
      "chart C even(x) odd(xi)\n"
      "operator delta on C = d[x]*d[xi]\n"
      "bracketdata flat on C parity odd : S[x][xi] = 1\n"
      "scalar act on C = x^2\n"
      "check jacobi op=delta\n"
      "check flatness op=delta\n"
      "check selfadjoint data=flat\n"
      "check theorem3 data=flat\n"
      "check modular data=flat\n"
      "check reduce data=flat\n"
      "check master data=flat action=act weight=1/2\n"
      "check pencil-roundtrip data=flat weight=2\n"
      "check pencil-singular data=flat weight=1/2\n";
  ManifestParse p = parse_manifest(text);
  REQUIRE(p.ok);
  Report r1 = run_checks(p.manifest, "inline");
  CHECK(r1.exit_code() == 0);
  for (const auto& res : r1.results) CHECK(res.verdict == Verdict::pass);

  // byte-identical reports across runs with the same seed
  Report r2 = run_checks(p.manifest, "inline");
  CHECK(r1.to_text() == r2.to_text());
  CHECK(r1.to_json() == r2.to_json());

  // failing check drives the exit code to 1
  std::string failing = text +
                        "bracketdata bad on C parity odd : S[x][xi] = 1 ; theta = xi\n"
                        "check theorem3 data=bad\n";
  ManifestParse pf = parse_manifest(failing);
  REQUIRE(pf.ok);
  Report rf = run_checks(pf.manifest, "inline");
  CHECK(rf.exit_code() == 1);
  CHECK(rf.results.back().verdict == Verdict::fail);
}

TEST_CASE("generated manifests round trip (randomized)") {
  Rng rng(331);
  for (int trial = 0; trial < 100; ++trial) {
    Manifest m;
    m.seed = rng.below(1000);
    ChartPtr chart = rng.below(2) ? chart_1_1() : chart_2_2();
    m.charts.emplace("C", chart);
    m.order.push_back({"chart", "C"});
    int nobj = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < nobj; ++i) {
      std::string name = "o" + std::to_string(i);
      switch (rng.below(4)) {
        case 0:
          m.scalars.emplace(name, random_graded_scalar(rng, chart, 2, 3));
          m.order.push_back({"scalar", name});
          break;
        case 1:
          m.operators.emplace(name, random_operator(rng, chart, 2, 2, 3));
          m.order.push_back({"operator", name});
          break;
        case 2: {
          PhaseSpace ps = PhaseSpace::of(chart);
          m.momenta.emplace(name, random_graded_scalar(rng, ps.extended(), 2, 2));
          m.momentum_charts.emplace(name, "C");
          m.order.push_back({"momentum", name});
          break;
        }
        default:
          m.densities.emplace(
              name, DensityElement::pure(Rational(rng.range(-1, 2), rng.range(1, 2)),
                                         random_graded_scalar(rng, chart, 2, 2)));
          m.order.push_back({"density", name});
      }
    }
    Manifest::Check chk;
    chk.kind = "equal";
    chk.args["lhs"] = "o0";
    chk.args["rhs"] = "o0";
    m.checks.push_back(chk);

    std::string printed = print_manifest(m);
    ManifestParse back = parse_manifest(printed);
    REQUIRE(back.ok);
    CHECK(print_manifest(back.manifest) == printed);
  }
}
