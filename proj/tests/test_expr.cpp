#include <doctest.h>

#include <vector>

#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/geometry.hpp"

using namespace finsler;

TEST_CASE("parse and evaluate") {
  auto a = expr::parse("sqrt((y1)^2+(y2)^2+(y3)^2)", 3);
  std::vector<double> env = {0, 0, 0, 3, 4, 0};
  CHECK(expr::eval(a, env) == doctest::Approx(5.0));
  auto b = expr::parse("x1^2*y2^3/y3 - -2", 3);
  std::vector<double> env2 = {2, 0, 0, 1, 2, 1};
  CHECK(expr::eval(b, env2) == doctest::Approx(34.0));
  auto c = expr::parse("2^-1 + x1^(-2)", 1);
  std::vector<double> env3 = {2, 0};
  CHECK(expr::eval(c, env3) == doctest::Approx(0.75));
}

TEST_CASE("jet evaluation gives derivatives") {
  auto a = expr::parse("x1*y1^3", 1);
  auto chart = seed_chart(ChartPoint{{2.0}, {3.0}}, 3);
  Jet f = expr::eval(a, chart);
  CHECK(f.value() == doctest::Approx(54.0));
  CHECK(f.partial({1, 2}) == doctest::Approx(18.0));
}

TEST_CASE("round trip through text") {
  for (const char* text : {"sqrt(y1^2 + x1^2*y2^3/y3)", "-(x1 - x2)*y1/2", "x1^-2 + y2^0.5"}) {
    auto a = expr::parse(text, 3);
    auto b = expr::parse(expr::to_string(a), 3);
    CHECK(expr::structurally_equal(a, b));
  }
  CHECK_FALSE(expr::structurally_equal(expr::parse("x1+y1", 1), expr::parse("y1+x1", 1)));
}

TEST_CASE("direction dependence") {
  CHECK(expr::depends_on_direction(expr::parse("x1 + y2", 2)));
  CHECK_FALSE(expr::depends_on_direction(expr::parse("x1*x2 + 3", 2)));
}

TEST_CASE("errors carry positions") {
  try {
    expr::parse("x1 + * y1", 1);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(expr::parse("x1 + (y1", 1), SyntaxError);
  CHECK_THROWS_AS(expr::parse("x3", 2), UnknownIdentifier);
  CHECK_THROWS_AS(expr::parse("z1", 2), UnknownIdentifier);
  CHECK_THROWS_AS(expr::parse("x1^y1", 1), NonLiteralExponent);
  std::vector<double> env = {0, -1};
  CHECK_THROWS_AS(expr::eval(expr::parse("sqrt(y1)", 1), env), DomainError);
  CHECK_THROWS_AS(expr::eval(expr::parse("1/x1", 1), env), DivisionBySingularJet);
}

TEST_CASE("guards") {
  auto g = expr::parse_guard("y3", 3);
  std::vector<double> env = {0, 0, 0, 0, 0, 2};
  CHECK(expr::eval(g.expr, env) == doctest::Approx(2.0));
}
