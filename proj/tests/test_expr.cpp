#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hyplab/expr.hpp"

using hyplab::Expr;
using hyplab::parse_expr;

TEST_CASE("parse and eval basics") {
  CHECK(parse_expr("2 + sin(2*pi*x)").eval(0.25, 0.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(parse_expr("x*t").eval(2.0, 3.0) == doctest::Approx(6.0));
  CHECK(parse_expr("pi").eval(0, 0) == doctest::Approx(std::numbers::pi));
  CHECK(parse_expr("e").eval(0, 0) == doctest::Approx(std::numbers::e));
  CHECK(parse_expr("exp(1)").eval(0, 0) == doctest::Approx(std::numbers::e));
  CHECK(parse_expr("tanh(100)").eval(0, 0) == doctest::Approx(1.0));
  CHECK(parse_expr("sqrt(2)^2").eval(0, 0) == doctest::Approx(2.0));
  CHECK(parse_expr("log(e)").eval(0, 0) == doctest::Approx(1.0));
  CHECK(parse_expr("2/(exp(t)+exp(-t))").eval(0.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("precedence and associativity") {
  // ^ binds tighter than unary minus; right-associative.
  CHECK(parse_expr("-2^2").eval(0, 0) == doctest::Approx(-4.0));
  CHECK(parse_expr("2^3^2").eval(0, 0) == doctest::Approx(512.0));
  CHECK(parse_expr("2^-1").eval(0, 0) == doctest::Approx(0.5));
  CHECK(parse_expr("1-2-3").eval(0, 0) == doctest::Approx(-4.0));
  CHECK(parse_expr("12/4/3").eval(0, 0) == doctest::Approx(1.0));
  CHECK(parse_expr("1+2*3").eval(0, 0) == doctest::Approx(7.0));
  CHECK(parse_expr("(1+2)*3").eval(0, 0) == doctest::Approx(9.0));
}

TEST_CASE("number forms") {
  CHECK(parse_expr("1e3").eval(0, 0) == doctest::Approx(1000.0));
  CHECK(parse_expr("2.5e-2").eval(0, 0) == doctest::Approx(0.025));
  CHECK(parse_expr(".5").eval(0, 0) == doctest::Approx(0.5));
  // "2e" must not swallow the identifier e as an exponent marker.
  CHECK(parse_expr("2*e").eval(0, 0) == doctest::Approx(2.0 * std::numbers::e));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(parse_expr("log(0)").eval(0, 0), hyplab::EvalDomainError);
  CHECK_THROWS_AS(parse_expr("log(-1)").eval(0, 0), hyplab::EvalDomainError);
  CHECK_THROWS_AS(parse_expr("sqrt(-1)").eval(0, 0), hyplab::EvalDomainError);
  CHECK_THROWS_AS(parse_expr("1/x").eval(0.0, 0.0), hyplab::EvalDomainError);
  CHECK_THROWS_AS(parse_expr("0^-1").eval(0, 0), hyplab::EvalDomainError);
  CHECK_THROWS_AS(parse_expr("(-2)^0.5").eval(0, 0), hyplab::EvalDomainError);
  CHECK(parse_expr("(-2)^3").eval(0, 0) == doctest::Approx(-8.0));
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse_expr("2 +"), hyplab::ParseError);
  CHECK_THROWS_AS(parse_expr("sin 3"), hyplab::ParseError);
  CHECK_THROWS_AS(parse_expr("foo(1)"), hyplab::ParseError);
  CHECK_THROWS_AS(parse_expr("(1+2"), hyplab::ParseError);
  CHECK_THROWS_AS(parse_expr("1 2"), hyplab::ParseError);
  CHECK_THROWS_AS(parse_expr(""), hyplab::ParseError);
  try {
    parse_expr("1+*2");
  } catch (const hyplab::ParseError& err) {
    CHECK(err.offset() == 2);
  }
}

TEST_CASE("derivatives against central differences") {
  auto fd = [](const Expr& e, char var, double x, double t) {
    double h = 1e-6;
    if (var == 'x') return (e.eval(x + h, t) - e.eval(x - h, t)) / (2 * h);
    return (e.eval(x, t + h) - e.eval(x, t - h)) / (2 * h);
  };
  const char* sources[] = {
      "2 + sin(2*pi*x)", "exp(-t^2)",     "x^3 - t*x",        "cos(x*t)/(2+sin(t))",
      "tanh(x - t)",     "sqrt(x+2)",     "log(2+cos(2*pi*x))", "x^t",
      "exp(x)*sin(t)",   "(x+1)^2/(t^2+1)",
  };
  for (const char* src : sources) {
    Expr e = parse_expr(src);
    for (char var : {'x', 't'}) {
      Expr d = e.diff(var);
      for (double x : {0.1, 0.7, 1.3}) {
        for (double t : {0.2, 1.0, 2.5}) {
          CAPTURE(src);
          CAPTURE(var);
          CHECK(d.eval(x, t) == doctest::Approx(fd(e, var, x, t)).epsilon(1e-5));
        }
      }
    }
  }
  // Exact spot check: d/dt exp(-t^2) at t=1 is -2 e^{-1}.
  CHECK(parse_expr("exp(-t^2)").diff('t').eval(0.0, 1.0) ==
        doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("print/parse fixpoint") {
  const char* sources[] = {
      "2 + sin(2*pi*x)", "-2^2",       "2^3^2",      "1-2-3",     "12/4/3",
      "x^t",             "exp(-t^2)",  "-(x+t)*3",   "1/(2+x)",   "cos(x*t)/(2+sin(t))",
  };
  for (const char* src : sources) {
    Expr e = parse_expr(src);
    std::string s1 = e.str();
    Expr e2 = parse_expr(s1);
    CHECK(s1 == e2.str());
    for (double x : {0.3, 1.7}) {
      for (double t : {-0.4, 2.2}) {
        CHECK(e.eval(x, t) == doctest::Approx(e2.eval(x, t)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("depends_on and combinators") {
  CHECK(parse_expr("sin(x)").depends_on('x'));
  CHECK_FALSE(parse_expr("sin(x)").depends_on('t'));
  CHECK(parse_expr("x*t").depends_on('t'));
  CHECK_FALSE(parse_expr("3+pi").depends_on('x'));

  Expr x = Expr::var_x();
  Expr t = Expr::var_t();
  Expr e = (x + t) * Expr::constant(2.0) - x / (t + Expr::constant(1.0));
  CHECK(e.eval(3.0, 1.0) == doctest::Approx(6.5));
  CHECK((-x).eval(2.0, 0.0) == doctest::Approx(-2.0));
}

TEST_CASE("periodicity check") {
  double ts[] = {-1.0, 0.0, 1.0};
  CHECK(hyplab::check_x_periodicity(parse_expr("2+sin(2*pi*x)"), ts, 64, 1e-9));
  CHECK(hyplab::check_x_periodicity(parse_expr("t^2+1"), ts, 64, 1e-9));
  CHECK_FALSE(hyplab::check_x_periodicity(parse_expr("x"), ts, 64, 1e-9));
  CHECK_FALSE(hyplab::check_x_periodicity(parse_expr("sin(x)"), ts, 64, 1e-9));
}
