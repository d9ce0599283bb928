#include "densalg/expr.hpp"

#include <cctype>

namespace densalg {

ExprPtr ExprNode::number(const Rational& v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::number;
  n->value = v;
  return n;
}
ExprPtr ExprNode::symbol(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::symbol;
  n->name = std::move(name);
  return n;
}
ExprPtr ExprNode::deriv(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::deriv;
  n->name = std::move(name);
  return n;
}
ExprPtr ExprNode::momentum(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::momentum;
  n->name = std::move(name);
  return n;
}
ExprPtr ExprNode::tvar() {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::tvar;
  return n;
}
ExprPtr ExprNode::unary(Kind k, ExprPtr x) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(x);
  return n;
}
ExprPtr ExprNode::binary(Kind k, ExprPtr x, ExprPtr y) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(x);
  n->b = std::move(y);
  return n;
}
ExprPtr ExprNode::power(ExprPtr x, const Rational& e) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::pow;
  n->a = std::move(x);
  n->value = e;
  return n;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw Error(Error::Code::parse_error,
                what + " at column " + std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (true) {
      if (eat('+'))
        lhs = ExprNode::binary(ExprNode::Kind::add, lhs, term());
      else if (eat('-'))
        lhs = ExprNode::binary(ExprNode::Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (true) {
      if (eat('*'))
        lhs = ExprNode::binary(ExprNode::Kind::mul, lhs, factor());
      else if (eat('/'))
        lhs = ExprNode::binary(ExprNode::Kind::div, lhs, factor());
      else
        return lhs;
    }
  }

  ExprPtr factor() {
    if (eat('-')) return ExprNode::unary(ExprNode::Kind::neg, factor());
    if (eat('+')) return factor();
    ExprPtr base = atom();
    if (eat('^')) return ExprNode::power(base, exponent());
    return base;
  }

  Rational integer() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected an integer");
    return parse_rational(text_.substr(start, pos_ - start));
  }

  Rational exponent() {
    if (eat('(') || eat('{')) {
      char close = text_[pos_ - 1] == '(' ? ')' : '}';
      Rational num = integer();
      Rational r = num;
      if (eat('/')) {
        Rational den = integer();
        if (den == 0) fail("zero denominator in exponent");
        r = num / den;
      }
      if (!eat(close)) fail("unterminated exponent");
      return r;
    }
    return integer();
  }

  std::string name_token() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return ExprNode::number(parse_rational(text_.substr(start, pos_ - start)));
    }
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      if (!eat(')')) fail("unterminated parenthesis");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = name_token();
      if ((name == "d" || name == "p") && peek() == '[') {
        eat('[');
        std::string coord = name_token();
        if (!eat(']')) fail("unterminated bracket");
        return name == "d" ? ExprNode::deriv(coord) : ExprNode::momentum(coord);
      }
      if (name == "t") return ExprNode::tvar();
      return ExprNode::symbol(name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

long integer_exponent(const Rational& e) {
  if (denominator(e) != 1)
    throw Error(Error::Code::parse_error, "exponent must be an integer here");
  return to_long(numerator(e));
}

}  // namespace

ExprPtr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string print_scalar(const GradedScalar& g) { return g.to_string(); }
std::string print_operator(const DiffOperator& d) { return d.to_string(); }
std::string print_momentum(const MomentumPolynomial& m) { return m.to_string(); }

std::string print_density(const DensityElement& d) {
  if (d.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, g] : d.terms()) {
    if (!first) out += " + ";
    first = false;
    std::string ws = rational_str(w);
    out += denominator(w) == 1 && w >= 0 ? "t^" + ws : "t^(" + ws + ")";
    out += "*(" + g.to_string() + ")";
  }
  return out;
}

GradedScalar eval_scalar(const ExprPtr& e, const ChartPtr& chart) {
  switch (e->kind) {
    case ExprNode::Kind::number:
      return GradedScalar::constant(chart, e->value);
    case ExprNode::Kind::symbol: {
      int idx = chart->index_of(e->name);
      if (idx < 0)
        throw Error(Error::Code::unknown_coordinate, "unknown coordinate: " + e->name);
      return GradedScalar::coordinate(chart, idx);
    }
    case ExprNode::Kind::neg:
      return -eval_scalar(e->a, chart);
    case ExprNode::Kind::add:
      return eval_scalar(e->a, chart) + eval_scalar(e->b, chart);
    case ExprNode::Kind::sub:
      return eval_scalar(e->a, chart) - eval_scalar(e->b, chart);
    case ExprNode::Kind::mul:
      return eval_scalar(e->a, chart) * eval_scalar(e->b, chart);
    case ExprNode::Kind::div:
      return eval_scalar(e->a, chart) * eval_scalar(e->b, chart).inverse();
    case ExprNode::Kind::pow:
      return eval_scalar(e->a, chart).pow(static_cast<int>(integer_exponent(e->value)));
    default:
      throw Error(Error::Code::parse_error, "not a scalar expression");
  }
}

DiffOperator eval_operator(const ExprPtr& e, const ChartPtr& chart) {
  switch (e->kind) {
    case ExprNode::Kind::deriv: {
      int idx = chart->index_of(e->name);
      if (idx < 0)
        throw Error(Error::Code::unknown_coordinate, "unknown coordinate: " + e->name);
      return DiffOperator::derivative(chart, idx);
    }
    case ExprNode::Kind::number:
    case ExprNode::Kind::symbol:
      return DiffOperator::mult(eval_scalar(e, chart));
    case ExprNode::Kind::neg:
      return -eval_operator(e->a, chart);
    case ExprNode::Kind::add:
      return eval_operator(e->a, chart) + eval_operator(e->b, chart);
    case ExprNode::Kind::sub:
      return eval_operator(e->a, chart) - eval_operator(e->b, chart);
    case ExprNode::Kind::mul:
      return eval_operator(e->a, chart).compose(eval_operator(e->b, chart));
    case ExprNode::Kind::div: {
      GradedScalar rhs = eval_scalar(e->b, chart);  // throws if rhs mentions d[...]
      return eval_operator(e->a, chart).compose(DiffOperator::mult(rhs.inverse()));
    }
    case ExprNode::Kind::pow: {
      long n = integer_exponent(e->value);
      if (n < 0) throw Error(Error::Code::parse_error, "negative operator power");
      return eval_operator(e->a, chart).pow(static_cast<int>(n));
    }
    default:
      throw Error(Error::Code::parse_error, "not an operator expression");
  }
}

MomentumPolynomial eval_momentum(const ExprPtr& e, const PhaseSpace& ps) {
  switch (e->kind) {
    case ExprNode::Kind::number:
      return GradedScalar::constant(ps.extended(), e->value);
    case ExprNode::Kind::symbol: {
      int idx = ps.base()->index_of(e->name);
      if (idx < 0)
        throw Error(Error::Code::unknown_coordinate, "unknown coordinate: " + e->name);
      return GradedScalar::coordinate(ps.extended(), idx);
    }
    case ExprNode::Kind::momentum: {
      int idx = ps.base()->index_of(e->name);
      if (idx < 0)
        throw Error(Error::Code::unknown_coordinate, "unknown coordinate: " + e->name);
      return ps.momentum(idx);
    }
    case ExprNode::Kind::neg:
      return -eval_momentum(e->a, ps);
    case ExprNode::Kind::add:
      return eval_momentum(e->a, ps) + eval_momentum(e->b, ps);
    case ExprNode::Kind::sub:
      return eval_momentum(e->a, ps) - eval_momentum(e->b, ps);
    case ExprNode::Kind::mul:
      return eval_momentum(e->a, ps) * eval_momentum(e->b, ps);
    case ExprNode::Kind::div: {
      MomentumPolynomial rhs = eval_momentum(e->b, ps);
      if (!ps.is_momentum_free(rhs))
        throw Error(Error::Code::bad_argument, "division by a momentum-dependent value");
      return eval_momentum(e->a, ps) * rhs.inverse();
    }
    case ExprNode::Kind::pow:
      return eval_momentum(e->a, ps).pow(static_cast<int>(integer_exponent(e->value)));
    default:
      throw Error(Error::Code::parse_error, "not a momentum expression");
  }
}

DensityElement eval_density(const ExprPtr& e, const ChartPtr& chart) {
  switch (e->kind) {
    case ExprNode::Kind::tvar:
      return DensityElement::pure(Rational(1), GradedScalar::constant(chart, Rational(1)));
    case ExprNode::Kind::number:
    case ExprNode::Kind::symbol:
      return DensityElement::function(eval_scalar(e, chart));
    case ExprNode::Kind::neg:
      return -eval_density(e->a, chart);
    case ExprNode::Kind::add:
      return eval_density(e->a, chart) + eval_density(e->b, chart);
    case ExprNode::Kind::sub:
      return eval_density(e->a, chart) - eval_density(e->b, chart);
    case ExprNode::Kind::mul:
      return eval_density(e->a, chart) * eval_density(e->b, chart);
    case ExprNode::Kind::div: {
      DensityElement rhs = eval_density(e->b, chart);
      auto w = rhs.pure_weight();
      if (!w.has_value() || *w != 0)
        throw Error(Error::Code::bad_argument, "division by a density of nonzero weight");
      return eval_density(e->a, chart) *
             DensityElement::function(rhs.coefficient(Rational(0)).inverse());
    }
    case ExprNode::Kind::pow: {
      // t carries rational powers; anything else needs an integer
      if (e->a->kind == ExprNode::Kind::tvar)
        return DensityElement::pure(e->value, GradedScalar::constant(chart, Rational(1)));
      long n = integer_exponent(e->value);
      if (n < 0) throw Error(Error::Code::parse_error, "negative density power");
      DensityElement acc = DensityElement::function(GradedScalar::constant(chart, Rational(1)));
      DensityElement base = eval_density(e->a, chart);
      for (long i = 0; i < n; ++i) acc = acc * base;
      return acc;
    }
    default:
      throw Error(Error::Code::parse_error, "not a density expression");
  }
}

}  // namespace densalg
