#include "densalg/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace densalg {

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int var) {
  Polynomial p(nvars);
  p.add_term(Monomial::unit(nvars, var), Rational(1));
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

bool Polynomial::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first.is_constant() && terms_.begin()->second == 1;
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  return terms_.begin()->second;
}

int Polynomial::degree() const {
  if (terms_.empty()) return 0;
  return terms_.rbegin()->first.degree();
}

int Polynomial::degree_in(int var) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exp(var));
  return d;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(nvars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r(nvars_);
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Polynomial Polynomial::pow(int e) const {
  Polynomial acc = constant(nvars_, Rational(1));
  for (int i = 0; i < e; ++i) acc = acc * (*this);
  return acc;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) {
    int e = m.exp(var);
    if (e == 0) continue;
    Monomial d = m;
    d.set_exp(var, e - 1);
    r.add_term(d, c * Rational(e));
  }
  return r;
}

std::pair<Monomial, Rational> Polynomial::leading() const {
  return *terms_.rbegin();
}

Rational Polynomial::eval_rational(const std::vector<Rational>& point) const {
  return eval<Rational>(point, Rational(0), Rational(1),
                        [](const Rational& one, const Rational& c) { return one * c; });
}

Polynomial Polynomial::divexact(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw Error(Error::Code::zero_denominator, "division by zero polynomial");
  Polynomial rem = a;
  Polynomial q(a.nvars_);
  auto [lbm, lbc] = b.leading();
  while (!rem.is_zero()) {
    auto [lm, lc] = rem.leading();
    if (!lbm.divides(lm))
      throw Error(Error::Code::bad_argument, "polynomial division is not exact");
    Monomial qm = lm / lbm;
    Rational qc = lc / lbc;
    q.add_term(qm, qc);
    Polynomial piece(a.nvars_);
    piece.add_term(qm, qc);
    rem = rem - piece * b;
  }
  return q;
}

namespace {

// gcd of all numerators / sign so the leading rational coefficient is positive;
// returns the scalar s with p = s * primitive(p)
Rational rational_content(const Polynomial& p) {
  Int num_gcd = 0;
  Int den_lcm = 1;
  for (const auto& [m, c] : p.terms()) {
    num_gcd = boost::multiprecision::gcd(num_gcd, numerator(c));
    den_lcm = boost::multiprecision::lcm(den_lcm, denominator(c));
  }
  if (num_gcd == 0) return Rational(1);
  Rational content(num_gcd, den_lcm);
  if (p.leading().second < 0) content = -content;
  return content;
}

Polynomial scale_down(const Polynomial& p, const Rational& s) {
  return p * rational_inverse(s);
}

// univariate view in `var`: coefficients indexed by the exponent of var
std::map<int, Polynomial> univariate_view(const Polynomial& p, int var) {
  std::map<int, Polynomial> view;
  for (const auto& [m, c] : p.terms()) {
    int e = m.exp(var);
    Monomial rest = m;
    rest.set_exp(var, 0);
    auto it = view.find(e);
    if (it == view.end()) it = view.emplace(e, Polynomial(p.nvars())).first;
    it->second.add_term(rest, c);
  }
  return view;
}

Polynomial leading_coeff_in(const Polynomial& p, int var) {
  auto view = univariate_view(p, var);
  return view.rbegin()->second;
}

// pseudo-remainder of a by b in variable var (deg_var a >= deg_var b > 0)
Polynomial pseudo_rem(Polynomial a, const Polynomial& b, int var) {
  Polynomial lb = leading_coeff_in(b, var);
  int db = b.degree_in(var);
  while (!a.is_zero() && a.degree_in(var) >= db) {
    int da = a.degree_in(var);
    Polynomial la = leading_coeff_in(a, var);
    Polynomial shift(a.nvars());
    shift.add_term(Monomial::unit(a.nvars(), var, da - db), Rational(1));
    a = a * lb - b * la * shift;
  }
  return a;
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b);

// content of p viewed as univariate in var: gcd of the coefficient polynomials
Polynomial content_in(const Polynomial& p, int var) {
  auto view = univariate_view(p, var);
  Polynomial g(p.nvars());
  for (const auto& [e, coeff] : view) {
    g = gcd_impl(g, coeff);
    if (g.is_one()) break;
  }
  return g;
}

Polynomial normalize_primitive(const Polynomial& p) {
  if (p.is_zero()) return p;
  return scale_down(p, rational_content(p));
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return normalize_primitive(b);
  if (b.is_zero()) return normalize_primitive(a);
  if (a.is_constant() || b.is_constant()) return Polynomial::constant(a.nvars(), Rational(1));

  // main variable: first variable occurring in either
  int var = -1;
  for (int v = 0; v < a.nvars() && var < 0; ++v)
    if (a.depends_on(v) || b.depends_on(v)) var = v;

  if (!a.depends_on(var)) {
    // a free of var: gcd(a, content_var(b))
    return gcd_impl(a, content_in(b, var));
  }
  if (!b.depends_on(var)) {
    return gcd_impl(content_in(a, var), b);
  }

  Polynomial ca = content_in(a, var);
  Polynomial cb = content_in(b, var);
  Polynomial cg = gcd_impl(ca, cb);

  Polynomial pa = normalize_primitive(Polynomial::divexact(a, ca));
  Polynomial pb = normalize_primitive(Polynomial::divexact(b, cb));

  // primitive PRS
  if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);
  while (true) {
    Polynomial r = pseudo_rem(pa, pb, var);
    if (r.is_zero()) break;
    r = Polynomial::divexact(r, content_in(r, var));
    r = normalize_primitive(r);
    pa = pb;
    pb = r;
    if (pb.degree_in(var) == 0) {
      pb = Polynomial::constant(a.nvars(), Rational(1));
      break;
    }
  }
  return normalize_primitive(cg * pb);
}

}  // namespace

Polynomial Polynomial::gcd(const Polynomial& a, const Polynomial& b) {
  return gcd_impl(a, b);
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    bool printed = false;
    if (mag != 1 || m.is_constant()) {
      os << rational_str(mag);
      printed = true;
    }
    for (int v = 0; v < nvars_; ++v) {
      int e = m.exp(v);
      if (e == 0) continue;
      if (printed) os << "*";
      os << names[static_cast<size_t>(v)];
      if (e > 1) os << "^" << e;
      printed = true;
    }
  }
  return os.str();
}

}  // namespace densalg
