#include <doctest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

using finsler::Jet;

TEST_CASE("polynomial product has the expected mixed partials") {
  // f = x^2 y^3 at (2, -1); d^2/dx^2 d^3/dy^3 f = 2 * 6 = 12
  Jet x = Jet::variable(0, 2.0, 2, 5);
  Jet y = Jet::variable(1, -1.0, 2, 5);
  Jet f = x * x * y * y * y;
  CHECK(f.value() == doctest::Approx(-4.0));
  CHECK(f.partial({1, 0}) == doctest::Approx(2 * 2.0 * -1.0));
  CHECK(f.partial({0, 1}) == doctest::Approx(3 * 4.0 * 1.0));
  CHECK(f.partial({1, 1}) == doctest::Approx(2 * 2.0 * 3 * 1.0));
  CHECK(f.partial({2, 3}) == doctest::Approx(12.0));
  CHECK(f.partial({0, 4}) == doctest::Approx(0.0));
}

TEST_CASE("sqrt, pow and division match closed-form derivatives") {
  Jet x = Jet::variable(0, 4.0, 1, 4);
  Jet s = sqrt(x);
  CHECK(s.value() == doctest::Approx(2.0));
  CHECK(s.partial({1}) == doctest::Approx(0.5 / 2.0));
  CHECK(s.partial({2}) == doctest::Approx(-0.25 * std::pow(4.0, -1.5)));
  CHECK(s.partial({3}) == doctest::Approx(0.375 * std::pow(4.0, -2.5)));
  CHECK(s.partial({4}) == doctest::Approx(-0.9375 * std::pow(4.0, -3.5)));

  Jet r = 1.0 / x;
  CHECK(r.partial({3}) == doctest::Approx(-6.0 / std::pow(4.0, 4)));

  Jet p = pow(x, -1.5);
  CHECK(p.partial({2}) == doctest::Approx(-1.5 * -2.5 * std::pow(4.0, -3.5)));

  Jet neg = Jet::variable(0, -2.0, 1, 3);
  Jet cube = pow(neg, 3.0);
  CHECK(cube.value() == doctest::Approx(-8.0));
  CHECK(cube.partial({1}) == doctest::Approx(12.0));
  CHECK(cube.partial({3}) == doctest::Approx(6.0));
}

TEST_CASE("composite: d/dx d/dy of sqrt(x^2 + y^2)") {
  // f_xy = -x y / r^3
  Jet x = Jet::variable(0, 3.0, 2, 3);
  Jet y = Jet::variable(1, 4.0, 2, 3);
  Jet f = sqrt(x * x + y * y);
  CHECK(f.value() == doctest::Approx(5.0));
  CHECK(f.partial({1, 1}) == doctest::Approx(-12.0 / 125.0));
  // f_xxy = y (2x^2 - y^2) / r^5
  CHECK(f.partial({2, 1}) == doctest::Approx(4.0 * (18.0 - 16.0) / 3125.0));
}

TEST_CASE("derivative lowers the order and truncation is consistent") {
  Jet x = Jet::variable(0, 1.5, 2, 4);
  Jet y = Jet::variable(1, 0.5, 2, 4);
  Jet f = x * x * x * y;
  Jet fx = f.derivative(0);
  CHECK(fx.order() == 3);
  CHECK(fx.value() == doctest::Approx(3 * 1.5 * 1.5 * 0.5));
  CHECK(fx.partial({1, 1}) == doctest::Approx(f.partial({2, 1})));
  Jet t = f.truncated(2);
  CHECK(t.order() == 2);
  CHECK(t.partial({1, 1}) == doctest::Approx(f.partial({1, 1})));
  CHECK_THROWS_AS((void)t.partial({2, 1}), finsler::OrderExceeded);
}

TEST_CASE("mixed orders combine at the lower order") {
  Jet a = Jet::variable(0, 1.0, 1, 4);
  Jet b = Jet::variable(0, 1.0, 1, 2);
  Jet c = a * b;
  CHECK(c.order() == 2);
  CHECK(c.partial({2}) == doctest::Approx(2.0));
}

TEST_CASE("errors") {
  Jet x = Jet::variable(0, 0.0, 1, 2);
  CHECK_THROWS_AS(sqrt(x), finsler::DomainError);
  CHECK_THROWS_AS(1.0 / x, finsler::DivisionBySingularJet);
  CHECK_THROWS_AS(pow(x - 1.0, 0.5), finsler::DomainError);
  CHECK_THROWS_AS(Jet::variable(3, 0.0, 2, 2), finsler::IndexOutOfRange);
}

TEST_CASE("jet linear solve") {
  // A = [[2,1],[1,3]] (x), b = [1, 2]: solution ((3-2x)/(6x^2-1)...) checked by residual
  Jet x = Jet::variable(0, 1.0, 1, 3);
  finsler::JetMatrix A = {{2.0 * x, constant_like(x, 1.0)}, {constant_like(x, 1.0), 3.0 * x}};
  std::vector<Jet> b = {constant_like(x, 1.0), 2.0 * x * x};
  auto sol = finsler::jet_linear_solve(A, b);
  for (int i = 0; i < 2; ++i) {
    Jet res = A[i][0] * sol[0] + A[i][1] * sol[1] - b[i];
    for (int k = 0; k <= 3; ++k) CHECK(std::abs(res.partial({k})) < 1e-12);
  }
  // value at x = 1: [[2,1],[1,3]] u = [1,2] -> u = (0.2, 0.6)
  CHECK(sol[0].value() == doctest::Approx(0.2));
  CHECK(sol[1].value() == doctest::Approx(0.6));
  finsler::JetMatrix S = {{constant_like(x, 1.0), constant_like(x, 2.0)}, {constant_like(x, 2.0), constant_like(x, 4.0)}};
  CHECK_THROWS_AS(finsler::jet_linear_solve(S, b), finsler::SingularConstantMatrix);
}
