#include "tonekit/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace tonekit {

struct Expr::Node {
  Op op = Op::constant;
  double value = 0.0;
  int index = 0; // variable index or integer exponent
  Expr a{Null{}}, b{Null{}};
};

namespace {

using Op = Expr::Op;

bool is_const(const Expr& e, double v) { return e.op() == Op::constant && e.constant_value() == v; }

} // namespace

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0 || index > 2)
    throw Error(ErrorKind::input, "variable index must be 0, 1 or 2");
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr::Op Expr::op() const { return node_->op; }
double Expr::constant_value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.op() == Op::constant && b.op() == Op::constant)
    return Expr::constant(a.constant_value() + b.constant_value());
  if (is_const(a, 0.0))
    return b;
  if (is_const(b, 0.0))
    return a;
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::add;
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.op() == Op::constant && b.op() == Op::constant)
    return Expr::constant(a.constant_value() - b.constant_value());
  if (is_const(b, 0.0))
    return a;
  if (is_const(a, 0.0))
    return -b;
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::sub;
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.op() == Op::constant && b.op() == Op::constant)
    return Expr::constant(a.constant_value() * b.constant_value());
  if (is_const(a, 0.0) || is_const(b, 0.0))
    return Expr::constant(0.0);
  if (is_const(a, 1.0))
    return b;
  if (is_const(b, 1.0))
    return a;
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::mul;
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.op() == Op::constant && b.op() == Op::constant && b.constant_value() != 0.0)
    return Expr::constant(a.constant_value() / b.constant_value());
  if (is_const(a, 0.0) && !is_const(b, 0.0))
    return Expr::constant(0.0);
  if (is_const(b, 1.0))
    return a;
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::div;
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator-(const Expr& a) {
  if (a.op() == Op::constant)
    return Expr::constant(-a.constant_value());
  if (a.op() == Op::neg)
    return a.lhs();
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::neg;
  n->a = a;
  return Expr(std::move(n));
}

Expr pow(const Expr& a, int k) {
  if (k == 0)
    return Expr::constant(1.0);
  if (k == 1)
    return a;
  if (a.op() == Op::constant)
    return Expr::constant(std::pow(a.constant_value(), k));
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::pow;
  n->a = a;
  n->index = k;
  return Expr(std::move(n));
}

Expr apply(Op fn, const Expr& a) {
  if (a.op() == Op::constant) {
    const double v = a.constant_value();
    switch (fn) {
    case Op::sin: return Expr::constant(std::sin(v));
    case Op::cos: return Expr::constant(std::cos(v));
    case Op::exp: return Expr::constant(std::exp(v));
    case Op::tanh: return Expr::constant(std::tanh(v));
    case Op::sqrt:
      if (v >= 0.0)
        return Expr::constant(std::sqrt(v));
      break;
    default: break;
    }
  }
  auto n = std::make_shared<Expr::Node>();
  n->op = fn;
  n->a = a;
  return Expr(std::move(n));
}

double Expr::eval_raw(const Point& p) const {
  const Node& n = *node_;
  switch (n.op) {
  case Op::constant: return n.value;
  case Op::variable: return p[n.index];
  case Op::add: return n.a.eval_raw(p) + n.b.eval_raw(p);
  case Op::sub: return n.a.eval_raw(p) - n.b.eval_raw(p);
  case Op::mul: return n.a.eval_raw(p) * n.b.eval_raw(p);
  case Op::div: return n.a.eval_raw(p) / n.b.eval_raw(p);
  case Op::neg: return -n.a.eval_raw(p);
  case Op::pow: {
    const double base = n.a.eval_raw(p);
    int k = n.index;
    if (k == 2)
      return base * base;
    return std::pow(base, k);
  }
  case Op::sin: return std::sin(n.a.eval_raw(p));
  case Op::cos: return std::cos(n.a.eval_raw(p));
  case Op::exp: return std::exp(n.a.eval_raw(p));
  case Op::sqrt: return std::sqrt(n.a.eval_raw(p));
  case Op::tanh: return std::tanh(n.a.eval_raw(p));
  }
  return 0.0;
}

double Expr::eval(const Point& p) const {
  const double v = eval_raw(p);
  if (!std::isfinite(v)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "'%s' is not finite at (%g, %g, %g)", to_string().c_str(), p[0], p[1], p[2]);
    throw Error(ErrorKind::evaluation, buf);
  }
  return v;
}

Expr Expr::derivative(int var) const {
  const Node& n = *node_;
  switch (n.op) {
  case Op::constant: return constant(0.0);
  case Op::variable: return constant(n.index == var ? 1.0 : 0.0);
  case Op::add: return n.a.derivative(var) + n.b.derivative(var);
  case Op::sub: return n.a.derivative(var) - n.b.derivative(var);
  case Op::mul: return n.a.derivative(var) * n.b + n.a * n.b.derivative(var);
  case Op::div: return (n.a.derivative(var) * n.b - n.a * n.b.derivative(var)) / pow(n.b, 2);
  case Op::neg: return -n.a.derivative(var);
  case Op::pow: return constant(n.index) * pow(n.a, n.index - 1) * n.a.derivative(var);
  case Op::sin: return apply(Op::cos, n.a) * n.a.derivative(var);
  case Op::cos: return -(apply(Op::sin, n.a) * n.a.derivative(var));
  case Op::exp: return *this * n.a.derivative(var);
  case Op::sqrt: return n.a.derivative(var) / (constant(2.0) * *this);
  case Op::tanh: return (constant(1.0) - pow(*this, 2)) * n.a.derivative(var);
  }
  return constant(0.0);
}

bool Expr::is_constant() const { return max_variable() < 0; }

int Expr::max_variable() const {
  const Node& n = *node_;
  switch (n.op) {
  case Op::constant: return -1;
  case Op::variable: return n.index;
  case Op::add:
  case Op::sub:
  case Op::mul:
  case Op::div: return std::max(n.a.max_variable(), n.b.max_variable());
  default: return n.a.max_variable();
  }
}

std::string Expr::to_string() const {
  const Node& n = *node_;
  auto fn = [&](const char* name) { return std::string(name) + "(" + n.a.to_string() + ")"; };
  switch (n.op) {
  case Op::constant: {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", n.value);
    return n.value < 0 ? "(" + std::string(buf) + ")" : buf;
  }
  case Op::variable: return std::string(1, "xyz"[n.index]);
  case Op::add: return "(" + n.a.to_string() + " + " + n.b.to_string() + ")";
  case Op::sub: return "(" + n.a.to_string() + " - " + n.b.to_string() + ")";
  case Op::mul: return "(" + n.a.to_string() + " * " + n.b.to_string() + ")";
  case Op::div: return "(" + n.a.to_string() + " / " + n.b.to_string() + ")";
  case Op::neg: return "(-" + n.a.to_string() + ")";
  case Op::pow: return n.a.to_string() + "^" + (n.index < 0 ? "(" + std::to_string(n.index) + ")" : std::to_string(n.index));
  case Op::sin: return fn("sin");
  case Op::cos: return fn("cos");
  case Op::exp: return fn("exp");
  case Op::sqrt: return fn("sqrt");
  case Op::tanh: return fn("tanh");
  }
  return "?";
}

namespace {

class Parser {
public:
  Parser(const std::string& s, int dim) : src_(s), dim_(dim) {}

  Expr parse() {
    skip_space();
    if (pos_ >= src_.size())
      fail("empty expression");
    Expr e = expr();
    skip_space();
    if (pos_ < src_.size())
      fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

private:
  const std::string& src_;
  int dim_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*'))
        e = e * factor();
      else if (accept('/'))
        e = e / factor();
      else
        return e;
    }
  }

  Expr factor() {
    if (accept('-'))
      return -factor();
    Expr b = base();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      bool negative = false;
      if (pos_ < src_.size() && src_[pos_] == '-') {
        negative = true;
        ++pos_;
      }
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        fail("exponent must be an integer");
      long k = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        k = k * 10 + (src_[pos_] - '0');
        if (k > 1000)
          fail_at(start, "exponent too large");
        ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
        fail_at(start, "exponent must be an integer");
      b = pow(b, negative ? -static_cast<int>(k) : static_cast<int>(k));
    }
    return b;
  }

  Expr base() {
    skip_space();
    if (pos_ >= src_.size())
      fail("unexpected end of expression");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')'))
        fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "x" || name == "y" || name == "z") {
        const int idx = name[0] - 'x';
        if (idx >= dim_)
          fail_at(start, "variable '" + name + "' is not available in dimension " + std::to_string(dim_));
        return Expr::variable(idx);
      }
      if (name == "pi")
        return Expr::constant(std::numbers::pi);
      Op fn;
      if (name == "sin")
        fn = Op::sin;
      else if (name == "cos")
        fn = Op::cos;
      else if (name == "exp")
        fn = Op::exp;
      else if (name == "sqrt")
        fn = Op::sqrt;
      else if (name == "tanh")
        fn = Op::tanh;
      else
        fail_at(start, "unknown identifier '" + name + "'");
      if (!accept('('))
        fail("expected '(' after " + name);
      Expr arg = expr();
      if (!accept(')'))
        fail("expected ')'");
      return apply(fn, arg);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin)
      fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    return Expr::constant(v);
  }
};

} // namespace

Expr parse_expr(const std::string& source, int dim) {
  if (dim < 1 || dim > 3)
    throw Error(ErrorKind::input, "expression dimension must be 1, 2 or 3");
  return Parser(source, dim).parse();
}

} // namespace tonekit
