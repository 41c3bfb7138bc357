#pragma once

#include "tonekit/core.hpp"

#include <memory>
#include <string>

namespace tonekit {

// Immutable expression tree over x, y, z. Copies share structure.
class Expr {
public:
  enum class Op { constant, variable, add, sub, mul, div, neg, pow, sin, cos, exp, sqrt, tanh };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v);
  static Expr variable(int index);

  Op op() const;
  double constant_value() const;
  int variable_index() const;
  int exponent() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  // Throws ErrorKind::evaluation for a non-finite result (sqrt of a
  // negative number, division by zero, overflow).
  double eval(const Point& p) const;
  Expr derivative(int var) const;

  bool is_constant() const;
  // Highest variable index used, -1 for constants.
  int max_variable() const;
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, int k);
  friend Expr apply(Op fn, const Expr& a);

private:
  struct Node;
  struct Null {};
  explicit Expr(Null) {}
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  double eval_raw(const Point& p) const;
  std::shared_ptr<const Node> node_;
};

// Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
// factor := ['-'] base ('^' ['-'] integer)?; base := number | x | y | z | pi
// | func '(' expr ')' | '(' expr ')'. Variables beyond `dim` are rejected.
Expr parse_expr(const std::string& source, int dim = 3);

} // namespace tonekit
