#include <doctest.h>

#include <cmath>

#include "finsler/fn_calculus.hpp"
#include "support.hpp"

using namespace finsler;
using testing::max_diff;

namespace {

// Chart (x, y) of a one-dimensional model: two variables.
std::vector<Jet> chart2(double x, double y) { return seed_chart(ChartPoint{{x}, {y}}, 3); }

}  // namespace

TEST_CASE("Lie bracket of linear fields") {
  auto c = chart2(0.7, -1.3);
  const Jet& x = c[0];
  const Jet& y = c[1];
  // W = x d/dy, Z = y d/dx: [W, Z] = x d/dx - y d/dy
  fn::Field W = {constant_like(x, 0.0), x};
  fn::Field Z = {y, constant_like(x, 0.0)};
  auto b = fn::lie_bracket(W, Z);
  CHECK(b[0].value() == doctest::Approx(0.7));
  CHECK(b[1].value() == doctest::Approx(1.3));
  // derivative of the bracket is still exact: d/dx of x = 1
  CHECK(b[0].gradient(0) == doctest::Approx(1.0));
}

TEST_CASE("FN bracket on simple forms") {
  auto c = chart2(0.4, 0.9);
  const Jet& x = c[0];
  auto I = fn::identity_form(2, x);
  auto O = fn::zero_form(2, x);
  fn::Field W = {x * x, c[1]};
  fn::Field Z = {c[1], x};
  auto iz = fn::fn_bracket(I, I, W, Z);
  for (const auto& e : iz) CHECK(std::abs(e.value()) < 1e-14);
  auto oz = fn::fn_bracket(O, I, W, Z);
  for (const auto& e : oz) CHECK(std::abs(e.value()) < 1e-14);
  // K = x-multiplication: [K,K](W,Z) = 2 N_K(W,Z); N_K(W,Z) = [xW, xZ] + x^2[W,Z] - x[xW,Z] - x[W,xZ] = 0
  fn::Form K = fn::scaled(I, 1.0);
  for (auto& row : K)
    for (auto& e : row) e = e * x;
  auto nk = fn::nijenhuis(K, W, Z);
  for (const auto& e : nk) CHECK(std::abs(e.value()) < 1e-13);
}

TEST_CASE("canonical forms on the hyperbolic plane") {
  auto model = testing::hyperbolic_model();
  ChartPoint p{{0.2, 1.3}, {0.8, -0.6}};
  LocalGeometry geo(model, p, 4);
  auto cf = fn::canonical_forms(geo);
  auto js = fn::act(cf.J, cf.spray);
  for (int a = 0; a < 4; ++a) CHECK(js[a].value() == doctest::Approx(cf.liouville[a].value()));
  auto hv = fn::compose(cf.h, cf.v);
  for (const auto& row : hv)
    for (const auto& e : row) CHECK(std::abs(e.value()) < 1e-14);
  // bracket curvature equals the coordinate curvature
  auto R = curvature(geo);
  auto Rfn = fn::fn_curvature(geo);
  for (int i = 0; i < 2; ++i) CHECK(max_diff(R[i], Rfn[i]) < 1e-13);
}
