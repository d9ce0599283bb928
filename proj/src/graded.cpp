#include "densalg/graded.hpp"

#include <bit>
#include <sstream>

namespace densalg {

int grassmann_merge_sign(uint32_t a, uint32_t b) {
  if (a & b) return 0;
  // count inversions: pairs (i in a, j in b) with i > j
  int inversions = 0;
  uint32_t bb = b;
  while (bb) {
    int j = std::countr_zero(bb);
    bb &= bb - 1;
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

GradedScalar::GradedScalar(ChartPtr chart) : chart_(std::move(chart)) {}

GradedScalar GradedScalar::constant(ChartPtr chart, const Rational& c) {
  GradedScalar g(chart);
  g.add(0, RationalFunction::constant(chart->n_even(), c));
  return g;
}

GradedScalar GradedScalar::coordinate(ChartPtr chart, int coord) {
  GradedScalar g(chart);
  if (coord < 0 || coord >= chart->size())
    throw Error(Error::Code::unknown_coordinate, "coordinate index out of range");
  if (chart->parity(coord) == Parity::even) {
    g.add(0, RationalFunction::variable(chart->n_even(), chart->even_var(coord)));
  } else {
    g.add(1u << chart->odd_bit(coord), RationalFunction::constant(chart->n_even(), Rational(1)));
  }
  return g;
}

GradedScalar GradedScalar::from_ratfun(ChartPtr chart, const RationalFunction& f) {
  GradedScalar g(chart);
  g.add(0, f);
  return g;
}

GradedScalar GradedScalar::term(ChartPtr chart, uint32_t mask, const RationalFunction& f) {
  GradedScalar g(chart);
  g.add(mask, f);
  return g;
}

void GradedScalar::add(uint32_t mask, const RationalFunction& f) {
  if (f.is_zero()) return;
  auto it = terms_.find(mask);
  if (it == terms_.end()) {
    terms_.emplace(mask, f);
  } else {
    RationalFunction s = it->second + f;
    if (s.is_zero())
      terms_.erase(it);
    else
      it->second = std::move(s);
  }
}

bool GradedScalar::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_constant());
}

Rational GradedScalar::constant_value() const {
  if (terms_.empty()) return Rational(0);
  return terms_.begin()->second.constant_value();
}

RationalFunction GradedScalar::body() const {
  auto it = terms_.find(0);
  if (it == terms_.end()) return RationalFunction(chart_->n_even());
  return it->second;
}

GradedScalar GradedScalar::soul() const {
  GradedScalar g(chart_);
  for (const auto& [m, f] : terms_)
    if (m != 0) g.terms_.emplace(m, f);
  return g;
}

std::optional<Parity> GradedScalar::parity() const {
  if (terms_.empty()) return Parity::even;
  int p = std::popcount(terms_.begin()->first) & 1;
  for (const auto& [m, f] : terms_)
    if ((std::popcount(m) & 1) != p) return std::nullopt;
  return static_cast<Parity>(p);
}

bool GradedScalar::is_homogeneous(Parity p) const {
  auto q = parity();
  return q.has_value() && (is_zero() || *q == p);
}

GradedScalar GradedScalar::parity_part(Parity p) const {
  GradedScalar g(chart_);
  for (const auto& [m, f] : terms_)
    if ((std::popcount(m) & 1) == parity_bit(p)) g.terms_.emplace(m, f);
  return g;
}

GradedScalar GradedScalar::operator-() const {
  GradedScalar g(chart_);
  for (const auto& [m, f] : terms_) g.terms_.emplace(m, -f);
  return g;
}

GradedScalar GradedScalar::operator+(const GradedScalar& o) const {
  require_same_chart(chart_, o.chart_);
  GradedScalar g = *this;
  for (const auto& [m, f] : o.terms_) g.add(m, f);
  return g;
}

GradedScalar GradedScalar::operator-(const GradedScalar& o) const {
  require_same_chart(chart_, o.chart_);
  GradedScalar g = *this;
  for (const auto& [m, f] : o.terms_) g.add(m, -f);
  return g;
}

GradedScalar GradedScalar::operator*(const GradedScalar& o) const {
  require_same_chart(chart_, o.chart_);
  GradedScalar g(chart_);
  for (const auto& [ma, fa] : terms_) {
    for (const auto& [mb, fb] : o.terms_) {
      int sign = grassmann_merge_sign(ma, mb);
      if (sign == 0) continue;
      RationalFunction f = fa * fb;
      if (sign < 0) f = -f;
      g.add(ma | mb, f);
    }
  }
  return g;
}

GradedScalar GradedScalar::operator*(const Rational& c) const {
  GradedScalar g(chart_);
  if (c == 0) return g;
  for (const auto& [m, f] : terms_) g.terms_.emplace(m, f * c);
  return g;
}

GradedScalar GradedScalar::operator*(const RationalFunction& f) const {
  GradedScalar g(chart_);
  if (f.is_zero()) return g;
  for (const auto& [m, c] : terms_) g.add(m, c * f);
  return g;
}

GradedScalar GradedScalar::partial(int coord) const {
  if (coord < 0 || coord >= chart_->size())
    throw Error(Error::Code::unknown_coordinate, "coordinate index out of range");
  GradedScalar g(chart_);
  if (chart_->parity(coord) == Parity::even) {
    int var = chart_->even_var(coord);
    for (const auto& [m, f] : terms_) g.add(m, f.derivative(var));
  } else {
    int bit = chart_->odd_bit(coord);
    uint32_t bitmask = 1u << bit;
    for (const auto& [m, f] : terms_) {
      if (!(m & bitmask)) continue;
      // left derivative: move the generator to the front past lower bits
      int below = std::popcount(m & (bitmask - 1));
      RationalFunction c = (below & 1) ? -f : f;
      g.add(m & ~bitmask, c);
    }
  }
  return g;
}

GradedScalar GradedScalar::inverse() const {
  RationalFunction b = body();
  if (b.is_zero())
    throw Error(Error::Code::non_invertible, "graded scalar has no invertible body");
  RationalFunction binv = b.inverse();
  // 1/(b + s) = (1/b) * sum_k (-s/b)^k, finite because the soul is nilpotent
  GradedScalar minus_u = -(soul() * binv);
  GradedScalar acc = GradedScalar::constant(chart_, Rational(1));
  GradedScalar p = GradedScalar::constant(chart_, Rational(1));
  while (true) {
    p = p * minus_u;
    if (p.is_zero()) break;
    acc = acc + p;
  }
  return acc * binv;
}

GradedScalar GradedScalar::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  GradedScalar acc = GradedScalar::constant(chart_, Rational(1));
  for (int i = 0; i < e; ++i) acc = acc * (*this);
  return acc;
}

GradedScalar GradedScalar::substitute(const std::vector<GradedScalar>& images,
                                      ChartPtr target) const {
  if (static_cast<int>(images.size()) != chart_->size())
    throw Error(Error::Code::bad_argument, "substitution image count mismatch");
  for (int c = 0; c < chart_->size(); ++c) {
    if (images[static_cast<size_t>(c)].chart() != target)
      throw Error(Error::Code::chart_mismatch, "substitution image on wrong chart");
    if (!images[static_cast<size_t>(c)].is_homogeneous(chart_->parity(c)))
      throw Error(Error::Code::parity_mismatch,
                  "substitution image parity differs from coordinate parity");
  }

  // even-variable images in even-var order
  std::vector<GradedScalar> even_images;
  for (int v = 0; v < chart_->n_even(); ++v)
    even_images.push_back(images[static_cast<size_t>(chart_->even_coord(v))]);

  GradedScalar zero(target);
  GradedScalar one = GradedScalar::constant(target, Rational(1));
  auto scale = [](const GradedScalar& unit, const Rational& c) { return unit * c; };

  GradedScalar out(target);
  for (const auto& [mask, f] : terms_) {
    GradedScalar num = f.num().eval<GradedScalar>(even_images, zero, one, scale);
    GradedScalar val(target);
    if (f.den().is_one()) {
      val = num;
    } else {
      GradedScalar den = f.den().eval<GradedScalar>(even_images, zero, one, scale);
      if (den.body().is_zero())
        throw Error(Error::Code::zero_denominator,
                    "denominator body vanishes after substitution");
      val = num * den.inverse();
    }
    uint32_t mm = mask;
    while (mm) {
      int bit = std::countr_zero(mm);
      mm &= mm - 1;
      val = val * images[static_cast<size_t>(chart_->odd_coord(bit))];
    }
    out = out + val;
  }
  return out;
}

std::string GradedScalar::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  const auto& names = chart_->even_names();
  for (const auto& [mask, f] : terms_) {
    std::string cs = f.to_string(names);
    bool neg = false;
    if (cs.size() > 1 && cs[0] == '-' && cs.find(' ') == std::string::npos &&
        cs.find('+') == std::string::npos) {
      neg = true;
      cs = cs.substr(1);
    }
    if (first) {
      if (neg) os << "-";
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    bool needs_parens = cs.find(' ') != std::string::npos;
    std::string printed = needs_parens ? "(" + cs + ")" : cs;
    if (mask == 0) {
      os << printed;
    } else {
      if (!(printed == "1")) os << printed << "*";
      bool firstg = true;
      uint32_t mm = mask;
      while (mm) {
        int bit = std::countr_zero(mm);
        mm &= mm - 1;
        if (!firstg) os << "*";
        os << chart_->name(chart_->odd_coord(bit));
        firstg = false;
      }
    }
  }
  return os.str();
}

}  // namespace densalg
