#pragma once

#include "densalg/density.hpp"
#include "densalg/momentum.hpp"

#include <memory>

namespace densalg {

/// Expression AST for the surface grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' exponent)?
///   atom   := integer | name | 'd' '[' name ']' | 'p' '[' name ']' | 't'
///           | '(' expr ')'
///   exponent := integer | '(' rational ')' | '{' rational '}'
struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { number, symbol, deriv, momentum, tvar, neg, add, sub, mul, div, pow };
  Kind kind;
  Rational value;  // number, or the exponent of pow
  std::string name;
  ExprPtr a, b;

  static ExprPtr number(const Rational& v);
  static ExprPtr symbol(std::string name);
  static ExprPtr deriv(std::string name);
  static ExprPtr momentum(std::string name);
  static ExprPtr tvar();
  static ExprPtr unary(Kind k, ExprPtr x);
  static ExprPtr binary(Kind k, ExprPtr x, ExprPtr y);
  static ExprPtr power(ExprPtr x, const Rational& e);
};

/// Parses one expression; offsets in thrown Error messages are 1-based
/// columns within `text`.
ExprPtr parse_expression(std::string_view text);

/// Pretty-printed canonical forms; parse(print(v)) == v.
std::string print_scalar(const GradedScalar& g);
std::string print_operator(const DiffOperator& d);
std::string print_momentum(const MomentumPolynomial& m);
std::string print_density(const DensityElement& d);

GradedScalar eval_scalar(const ExprPtr& e, const ChartPtr& chart);
DiffOperator eval_operator(const ExprPtr& e, const ChartPtr& chart);
MomentumPolynomial eval_momentum(const ExprPtr& e, const PhaseSpace& ps);
DensityElement eval_density(const ExprPtr& e, const ChartPtr& chart);

}  // namespace densalg
