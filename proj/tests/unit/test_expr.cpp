#include "tonekit/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tonekit;

TEST_CASE("evaluation") {
  const Point p(0.3, -1.2, 2.0);
  CHECK(parse_expr("x + 2*y - z/4").eval(p) == doctest::Approx(0.3 - 2.4 - 0.5));
  CHECK(parse_expr("-x^2").eval(p) == doctest::Approx(-0.09));
  CHECK(parse_expr("x^-2").eval(p) == doctest::Approx(1.0 / 0.09));
  CHECK(parse_expr("sin(pi*x)*cos(y) + exp(z) - sqrt(4) + tanh(1)").eval(p) ==
        doctest::Approx(std::sin(std::numbers::pi * 0.3) * std::cos(-1.2) + std::exp(2.0) - 2.0 + std::tanh(1.0)));
  CHECK(parse_expr("1e-3 * 2.5E2").eval(p) == doctest::Approx(0.25));
  CHECK(parse_expr("5").is_constant());
}

TEST_CASE("symbolic derivatives match central differences") {
  const char* sources[] = {"x*y + z^3", "sin(x)*exp(-y) + sqrt(1 + z^2)", "x/(1 + y^2) - tanh(z*x)",
                           "cos(x*y*z)^2", "(x - y)^-1"};
  const Point p(0.4, 0.7, -0.3);
  for (const char* s : sources) {
    const Expr e = parse_expr(s);
    for (int v = 0; v < 3; ++v) {
      Point a = p, b = p;
      const double h = 1e-6;
      a[v] += h;
      b[v] -= h;
      const double fd = (e.eval(a) - e.eval(b)) / (2 * h);
      CHECK(e.derivative(v).eval(p) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  CHECK(parse_expr("x + 3").derivative(0).is_constant());
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_expr("x +");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 4);
  }
  CHECK_THROWS_AS(parse_expr("x^0.5"), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse_expr("(x + 1"), ParseError);
  CHECK_THROWS_AS(parse_expr("z", 2), ParseError);
  CHECK_NOTHROW(parse_expr("y", 2));
}

TEST_CASE("non-finite results are evaluation errors") {
  try {
    parse_expr("sqrt(x)").eval(Point(-1, 0, 0));
    FAIL("expected an evaluation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::evaluation);
  }
  CHECK_THROWS_AS(parse_expr("1/x").eval(Point::Zero()), Error);
}

TEST_CASE("printing round trip") {
  const Expr e = parse_expr("x*y - 3*sin(z)^2 + 1/(x + 2)");
  const Expr back = parse_expr(e.to_string());
  const Point p(0.1, 0.2, 0.3);
  CHECK(back.eval(p) == doctest::Approx(e.eval(p)).epsilon(1e-15));
}
