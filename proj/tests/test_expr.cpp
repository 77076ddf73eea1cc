#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pencil/errors.hpp"
#include "pencil/expr.hpp"

using namespace pencil;

namespace {

double ev(const std::string& text, std::vector<double> x, int m = -1) {
  if (m < 0) m = static_cast<int>(x.size());
  return parse_expr(text, m)->eval(x);
}

}  // namespace

TEST_CASE("parse and evaluate basics") {
  CHECK(ev("x1*(x1+x2)", {1, 2}) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(ev("7", {0.3}) == 7.0);
  CHECK(ev("x2*sin(x1)", {1, 2}) ==
        doctest::Approx(2 * std::sin(1.0)).epsilon(1e-15));
  // sin(1)^2, frozen from an independent evaluation
  CHECK(ev("sin(x1)^2", {1.0, 99.0}) ==
        doctest::Approx(0.7080734182735712).epsilon(1e-15));
  CHECK(ev("sqrt(x1)", {9}) == 3.0);
  CHECK(ev("cos(x1)", {0}) == 1.0);
  CHECK(ev("1.5e2", {1}) == 150.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(ev("2*3+4*5", {1}) == 26.0);
  CHECK(ev("x1-x2-x1", {5, 2}) == -2.0);        // left associative
  CHECK(ev("2^3", {1}) == 8.0);
  CHECK(ev("-x1^2", {2}) == -4.0);              // ^ binds tighter than unary -
  CHECK(ev("(-x1)^2", {2}) == 4.0);
  CHECK(ev("6/3/2", {1}) == 1.0);
  CHECK(ev("1/x1^2", {4}) == doctest::Approx(1.0 / 16));
  CHECK(ev("--x1", {3}) == 3.0);
  CHECK(ev("0^0", {1}) == 1.0);                 // integer-power semantics
}

TEST_CASE("syntax and lookup errors") {
  CHECK_THROWS_WITH_AS(parse_expr("x1 + * x2", 2), doctest::Contains("byte 5"),
                       Error);
  CHECK_THROWS_AS(parse_expr("", 2), Error);
  CHECK_THROWS_AS(parse_expr("x1 + ", 2), Error);
  CHECK_THROWS_AS(parse_expr("(x1", 2), Error);
  CHECK_THROWS_AS(parse_expr("x1^2^3", 2), Error);
  CHECK_THROWS_AS(parse_expr("x1^-2", 2), Error);
  CHECK_THROWS_AS(parse_expr("x1^2.5", 2), Error);

  try {
    parse_expr("foo(x1)", 2);
    FAIL("expected UnknownFunction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownFunction);
  }
  try {
    parse_expr("x3", 2);
    FAIL("expected VariableOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VariableOutOfRange);
  }
  CHECK_THROWS_AS(parse_expr("x0", 2), Error);
}

TEST_CASE("evaluation faults carry the offending subexpression") {
  try {
    ev("1/(x1+x2)", {1, -1});
    FAIL("expected EvalFault");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvalFault);
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
  }
  try {
    ev("sqrt(x1-x2)", {1, 2});
    FAIL("expected EvalFault");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvalFault);
    CHECK(std::string(e.what()).find("sqrt") != std::string::npos);
  }
}

TEST_CASE("eval is pure") {
  ExprPtr e = parse_expr("x2*sin(x1)^3 - 2/(x1+x2)", 2);
  std::vector<double> x{1.37, 0.21};
  double a = e->eval(x);
  double b = e->eval(x);
  CHECK(a == b);  // bit identical
}

namespace {

ExprPtr random_tree(std::mt19937_64& rng, int depth, int m) {
  std::uniform_real_distribution<double> uc(-3, 3);
  auto choice = rng() % (depth == 0 ? 2 : 7);
  switch (choice) {
    case 0: return Expr::constant(uc(rng));
    case 1: return Expr::variable(1 + static_cast<int>(rng() % m));
    case 2: return Expr::unary(UnaryOp::Sin, random_tree(rng, depth - 1, m));
    case 3: return Expr::unary(UnaryOp::Cos, random_tree(rng, depth - 1, m));
    case 4:
      return Expr::binary(BinaryOp::Add, random_tree(rng, depth - 1, m),
                          random_tree(rng, depth - 1, m));
    case 5:
      return Expr::binary(BinaryOp::Mul, random_tree(rng, depth - 1, m),
                          random_tree(rng, depth - 1, m));
    default:
      return Expr::binary(BinaryOp::Pow, random_tree(rng, depth - 1, m),
                          Expr::constant(static_cast<double>(rng() % 4)));
  }
}

}  // namespace

TEST_CASE("print/parse round trip preserves evaluation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-2, 2);
  for (int t = 0; t < 60; ++t) {
    ExprPtr e = random_tree(rng, 4, 2);
    ExprPtr r = parse_expr(e->to_string(), 2);
    for (int p = 0; p < 100; ++p) {
      std::vector<double> x{ux(rng), ux(rng)};
      double a = e->eval(x), b = r->eval(x);
      CHECK(std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)));
    }
  }
}
