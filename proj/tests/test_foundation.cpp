#include <doctest.h>

#include "densalg/coordinate_change.hpp"
#include "densalg/random.hpp"
#include "densalg/supermatrix.hpp"

using namespace densalg;

namespace {

ChartPtr chart_1_1() { return Chart::make({{"x", Parity::even}, {"xi", Parity::odd}}); }
ChartPtr chart_2_2() {
  return Chart::make(
      {{"x", Parity::even}, {"y", Parity::even}, {"xi", Parity::odd}, {"eta", Parity::odd}});
}

GradedScalar gs_const(const ChartPtr& c, long n, long d = 1) {
  return GradedScalar::constant(c, Rational(n, d));
}

}  // namespace

TEST_CASE("rational basics") {
  Rational a(3, 6);
  CHECK(rational_str(a) == "1/2");
  CHECK(rational_pow(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK_THROWS_AS(parse_rational("x"), Error);
}

TEST_CASE("polynomial arithmetic and gcd") {
  // (x+y)^2 / (x+y) reduces
  Polynomial x = Polynomial::variable(2, 0);
  Polynomial y = Polynomial::variable(2, 1);
  Polynomial s = x + y;
  Polynomial p = s * s * (x - y);
  Polynomial q = s * (x * x);
  Polynomial g = Polynomial::gcd(p, q);
  CHECK(g == s);
  CHECK(Polynomial::divexact(p, g) == s * (x - y));

  Rng rng(42);
  for (int i = 0; i < 30; ++i) {
    Polynomial a = random_polynomial(rng, 2, 3, 3);
    Polynomial b = random_polynomial(rng, 2, 3, 3);
    Polynomial c = random_polynomial(rng, 2, 2, 2);
    if (c.is_zero()) continue;
    Polynomial gg = Polynomial::gcd(a * c, b * c);
    if ((a * c).is_zero() || (b * c).is_zero()) continue;
    // c divides the gcd
    CHECK_NOTHROW(Polynomial::divexact(gg, Polynomial::gcd(gg, c)));
    Polynomial gc = Polynomial::gcd(gg, c);
    CHECK(gc.degree() == c.degree());
  }
}

TEST_CASE("rational function canonical form") {
  Polynomial x = Polynomial::variable(1, 0);
  Polynomial one = Polynomial::constant(1, Rational(1));
  RationalFunction f(x * x - one, x - one);  // (x^2-1)/(x-1) = x+1
  CHECK(f.is_polynomial());
  CHECK(f.num() == x + one);

  RationalFunction g(x, x * Rational(2));  // x/(2x) = 1/2
  CHECK(g == RationalFunction::constant(1, Rational(1, 2)));

  RationalFunction d = RationalFunction(one, x).derivative(0);  // -1/x^2
  CHECK(d == RationalFunction(-one, x * x));
}

TEST_CASE("graded scalar products and derivatives") {
  auto c = chart_2_2();
  GradedScalar x = GradedScalar::coordinate(c, 0);
  GradedScalar xi = GradedScalar::coordinate(c, 2);
  GradedScalar eta = GradedScalar::coordinate(c, 3);

  CHECK((xi * xi).is_zero());
  CHECK(eta * xi == -(xi * eta));
  CHECK((x + xi * eta) * (x - xi * eta) == x * x);

  // partials
  CHECK((x * x).partial(0) == x * Rational(2));
  CHECK((xi * eta).partial(2) == eta);
  CHECK((eta * xi).partial(2) == -eta);

  // parity
  CHECK(xi.parity() == Parity::odd);
  CHECK((xi * eta).parity() == Parity::even);
  CHECK(!(x + xi).parity().has_value());
}

TEST_CASE("graded scalar supercommutativity and Leibniz (randomized)") {
  auto c = chart_2_2();
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Parity pa = static_cast<Parity>(rng.below(2));
    Parity pb = static_cast<Parity>(rng.below(2));
    GradedScalar a = random_graded_scalar_of_parity(rng, c, pa, 2, 3);
    GradedScalar b = random_graded_scalar_of_parity(rng, c, pb, 2, 3);
    GradedScalar ab = a * b;
    GradedScalar ba = b * a;
    if (pa == Parity::odd && pb == Parity::odd)
      CHECK(ab == -ba);
    else
      CHECK(ab == ba);

    // graded Leibniz for every coordinate
    for (int coord = 0; coord < c->size(); ++coord) {
      GradedScalar lhs = ab.partial(coord);
      GradedScalar rhs = a.partial(coord) * b;
      GradedScalar second = a * b.partial(coord);
      bool flip = c->parity(coord) == Parity::odd && pa == Parity::odd;
      rhs = flip ? rhs - second : rhs + second;
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("partial derivatives graded-commute") {
  auto c = chart_2_2();
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    GradedScalar a = random_graded_scalar(rng, c, 3, 4);
    for (int u = 0; u < c->size(); ++u)
      for (int v = 0; v < c->size(); ++v) {
        GradedScalar duv = a.partial(v).partial(u);
        GradedScalar dvu = a.partial(u).partial(v);
        bool both_odd = c->parity(u) == Parity::odd && c->parity(v) == Parity::odd;
        CHECK(duv == (both_odd ? -dvu : dvu));
      }
  }
}

TEST_CASE("graded scalar inverse") {
  auto c = chart_1_1();
  GradedScalar x = GradedScalar::coordinate(c, 0);
  GradedScalar xi = GradedScalar::coordinate(c, 1);
  GradedScalar one = gs_const(c, 1);

  GradedScalar g = x + xi;  // mixed parity but invertible body
  GradedScalar inv = g.inverse();
  CHECK(g * inv == one);

  auto c2 = chart_2_2();
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    GradedScalar a = random_graded_scalar(rng, c2, 2, 3);
    GradedScalar u = a + gs_const(c2, 1 + static_cast<long>(i % 3));
    if (u.body().is_zero()) continue;
    CHECK(u * u.inverse() == GradedScalar::constant(c2, Rational(1)));
  }
  CHECK_THROWS_AS(xi.inverse(), Error);
}

TEST_CASE("substitution examples") {
  auto c = chart_1_1();

  // x' = 2x
  auto cp = Chart::make({{"xp", Parity::even}, {"xip", Parity::odd}});
  std::vector<GradedScalar> fwd{GradedScalar::coordinate(c, 0) * Rational(2),
                                GradedScalar::coordinate(c, 1)};
  GradedScalar a = GradedScalar::coordinate(cp, 0);
  CHECK(a.substitute(fwd, c) == GradedScalar::coordinate(c, 0) * Rational(2));

  // 1/x' with x' = x^3 -> 1/x^3
  Polynomial x1(1);
  GradedScalar inv_xp = GradedScalar::from_ratfun(
      cp, RationalFunction(Polynomial::constant(1, Rational(1)), Polynomial::variable(1, 0)));
  std::vector<GradedScalar> cube{GradedScalar::coordinate(c, 0).pow(3),
                                 GradedScalar::coordinate(c, 1)};
  GradedScalar expect = GradedScalar::from_ratfun(
      c, RationalFunction(Polynomial::constant(1, Rational(1)), Polynomial::variable(1, 0).pow(3)));
  CHECK(inv_xp.substitute(cube, c) == expect);

  // xi' = xi, eta' = eta + x*xi : xi'eta' -> xi*eta
  auto s2 = chart_2_2();
  auto t2 = Chart::make(
      {{"u", Parity::even}, {"v", Parity::even}, {"xip", Parity::odd}, {"etap", Parity::odd}});
  GradedScalar xs = GradedScalar::coordinate(s2, 0);
  GradedScalar xi_s = GradedScalar::coordinate(s2, 2);
  GradedScalar eta_s = GradedScalar::coordinate(s2, 3);
  std::vector<GradedScalar> fwd2{xs, GradedScalar::coordinate(s2, 1), xi_s, eta_s + xs * xi_s};
  GradedScalar prod = GradedScalar::coordinate(t2, 2) * GradedScalar::coordinate(t2, 3);
  CHECK(prod.substitute(fwd2, s2) == xi_s * eta_s);
}

TEST_CASE("substitution is an algebra homomorphism (randomized)") {
  auto src = chart_2_2();
  auto tgt = Chart::make(
      {{"u", Parity::even}, {"v", Parity::even}, {"mu", Parity::odd}, {"nu", Parity::odd}});
  Rng rng(19);
  for (int i = 0; i < 60; ++i) {
    // random parity-correct polynomial images of the target coordinates
    std::vector<GradedScalar> images;
    for (int coord = 0; coord < 4; ++coord)
      images.push_back(
          random_graded_scalar_of_parity(rng, src, tgt->parity(coord), 2, 2));
    GradedScalar f = random_graded_scalar(rng, tgt, 2, 3);
    GradedScalar g = random_graded_scalar(rng, tgt, 2, 3);
    CHECK((f * g).substitute(images, src) ==
          f.substitute(images, src) * g.substitute(images, src));
  }
}

TEST_CASE("chain rule convention") {
  // d_a(subst f) = sum_b (d_a fwd^b) * subst(d_b f)
  auto src = chart_2_2();
  auto tgt = Chart::make(
      {{"u", Parity::even}, {"v", Parity::even}, {"mu", Parity::odd}, {"nu", Parity::odd}});
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    std::vector<GradedScalar> images;
    for (int coord = 0; coord < 4; ++coord)
      images.push_back(random_graded_scalar_of_parity(rng, src, tgt->parity(coord), 2, 2));
    GradedScalar f = random_graded_scalar(rng, tgt, 2, 3);
    for (int a = 0; a < src->size(); ++a) {
      GradedScalar lhs = f.substitute(images, src).partial(a);
      GradedScalar rhs(src);
      for (int b = 0; b < tgt->size(); ++b)
        rhs = rhs + images[static_cast<size_t>(b)].partial(a) *
                        f.partial(b).substitute(images, src);
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("berezinian examples") {
  auto c = chart_1_1();
  GradedScalar x = GradedScalar::coordinate(c, 0);
  GradedScalar xi = GradedScalar::coordinate(c, 1);
  GradedScalar one = gs_const(c, 1);

  // purely even: determinant
  SuperMatrix m(c, {Parity::even, Parity::even}, {Parity::even, Parity::even});
  m.at(0, 0) = x;
  m.at(0, 1) = one;
  m.at(1, 0) = one * Rational(2);
  m.at(1, 1) = x;
  CHECK(berezinian(m) == x * x - one * Rational(2));

  // purely odd-odd block: 1/det
  SuperMatrix d(c, {Parity::odd}, {Parity::odd});
  d.at(0, 0) = x;
  CHECK(berezinian(d) == x.inverse());

  // 1|1 block matrix [[a, beta], [gamma, d]] -> a/d - beta*gamma/d^2
  GradedScalar a_ = x + gs_const(c, 3);
  GradedScalar beta = xi * Rational(2);
  GradedScalar gamma = xi;
  GradedScalar dd = x;
  SuperMatrix s(c, {Parity::even, Parity::odd}, {Parity::even, Parity::odd});
  s.at(0, 0) = a_;
  s.at(0, 1) = beta;
  s.at(1, 0) = gamma;
  s.at(1, 1) = dd;
  GradedScalar expect = a_ * dd.inverse() - beta * gamma * dd.inverse() * dd.inverse();
  CHECK(berezinian(s) == expect);
}

TEST_CASE("berezinian multiplicativity (randomized)") {
  auto c = chart_2_2();
  Rng rng(31);

  auto random_invertible = [&](const std::vector<Parity>& par) {
    SuperMatrix m(c, par, par);
    int n = static_cast<int>(par.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Parity need = parity_add(par[static_cast<size_t>(i)], par[static_cast<size_t>(j)]);
        GradedScalar e = random_graded_scalar_of_parity(rng, c, need, 1, 2);
        if (i == j) e = e + gs_const(c, rng.range(1, 3));
        m.at(i, j) = e;
      }
    return m;
  };

  std::vector<std::vector<Parity>> shapes = {
      {Parity::even, Parity::odd},
      {Parity::even, Parity::even, Parity::odd},
  };
  for (const auto& shape : shapes) {
    for (int i = 0; i < 25; ++i) {
      SuperMatrix m = random_invertible(shape);
      SuperMatrix n = random_invertible(shape);
      GradedScalar bm(c), bn(c), bmn(c);
      try {
        bm = berezinian(m);
        bn = berezinian(n);
        bmn = berezinian(m * n);
      } catch (const Error&) {
        continue;  // rejection sampling: skip non-invertible draws
      }
      CHECK(bmn == bm * bn);
    }
  }
}

TEST_CASE("solve_linear on supermatrices") {
  auto c = chart_2_2();
  Rng rng(57);
  std::vector<Parity> par{Parity::even, Parity::odd};
  for (int trial = 0; trial < 25; ++trial) {
    SuperMatrix m(c, par, par);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Parity need = parity_add(par[static_cast<size_t>(i)], par[static_cast<size_t>(j)]);
        GradedScalar e = random_graded_scalar_of_parity(rng, c, need, 1, 2);
        if (i == j) e = e + gs_const(c, rng.range(1, 3));
        m.at(i, j) = e;
      }
    std::vector<GradedScalar> v{random_graded_scalar(rng, c, 1, 2),
                                random_graded_scalar(rng, c, 1, 2)};
    std::vector<GradedScalar> rhs;
    for (int i = 0; i < 2; ++i) {
      GradedScalar acc(c);
      for (int j = 0; j < 2; ++j) acc = acc + m.at(i, j) * v[static_cast<size_t>(j)];
      rhs.push_back(acc);
    }
    std::vector<GradedScalar> sol;
    try {
      sol = solve_linear(m, rhs);
    } catch (const Error&) {
      continue;
    }
    for (int i = 0; i < 2; ++i) {
      GradedScalar acc(c);
      for (int j = 0; j < 2; ++j) acc = acc + m.at(i, j) * sol[static_cast<size_t>(j)];
      CHECK(acc == rhs[static_cast<size_t>(i)]);
    }
  }
}

TEST_CASE("coordinate change construction checks") {
  auto src = chart_1_1();
  auto tgt = Chart::make({{"xp", Parity::even}, {"xip", Parity::odd}});
  GradedScalar x = GradedScalar::coordinate(src, 0);
  GradedScalar xi = GradedScalar::coordinate(src, 1);

  // x' = 2x, xi' = xi with explicit inverse
  std::vector<GradedScalar> fwd{x * Rational(2), xi};
  std::vector<GradedScalar> inv{GradedScalar::coordinate(tgt, 0) * Rational(1, 2),
                                GradedScalar::coordinate(tgt, 1)};
  CoordinateChange ch(src, tgt, fwd, inv);
  CHECK(ch.jacobian_berezinian() == GradedScalar::constant(src, Rational(2)));

  // x' = x^3: no rational inverse; allowed without one
  CoordinateChange cube(src, tgt, {x.pow(3), xi});
  CHECK(cube.jacobian_berezinian() == x * x * Rational(3));

  // degenerate: x' = x*x fails at body level? jacobian 2x has nonzero body as a
  // rational function, so it is accepted; genuinely degenerate is x' = const.
  CHECK_THROWS_AS(CoordinateChange(src, tgt, {gs_const(src, 1), xi}), Error);

  // bad inverse is rejected
  std::vector<GradedScalar> bad_inv{GradedScalar::coordinate(tgt, 0),
                                    GradedScalar::coordinate(tgt, 1)};
  CHECK_THROWS_AS(CoordinateChange(src, tgt, fwd, bad_inv), Error);
}
