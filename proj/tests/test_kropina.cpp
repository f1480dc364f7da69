#include <doctest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/kropina.hpp"
#include "support.hpp"

using namespace finsler;
using testing::max_diff;

namespace {

// F^ for the flat metric with phi = -x, in plain doubles.
double flat_hat(const Vector& x, const Vector& y, double m) {
  double yy = 0, xy = 0;
  for (int i = 0; i < 3; ++i) {
    yy += y[i] * y[i];
    xy += x[i] * y[i];
  }
  return std::pow(std::sqrt(yy), m + 1) * std::pow(-xy, -m);
}

// Half Hessian of F^2 by central differences.
Matrix fd_metric(const Vector& x, const Vector& y, double m) {
  const double h = 1e-4;
  Matrix g(3, Vector(3));
  auto E = [&](Vector v) { return flat_hat(x, v, m) * flat_hat(x, v, m); };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Vector pp = y, pm = y, mp = y, mm = y;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      g[i][j] = 0.5 * (E(pp) - E(pm) - E(mp) + E(mm)) / (4 * h * h);
    }
  return g;
}

}  // namespace

TEST_CASE("hand-computed anchor: flat, m = 1") {
  auto model = testing::flat_model(1.0);
  ChartPoint p{{1, 0, 0}, {-1, 0, 0}};
  auto ctx = context(model, p);
  CHECK(ctx.Phi == doctest::Approx(1.0));
  CHECK(ctx.norm_sq == doctest::Approx(1.0));
  CHECK(ctx.D == doctest::Approx(1.0));
  CHECK(ctx.Psi1 == doctest::Approx(2.0));
  CHECK(ctx.Psi2 == doctest::Approx(1.0));
  auto pred = predicted(model, p, ctx);
  CHECK(max_diff(pred.g_hat, Matrix{{1, 0, 0}, {0, 2, 0}, {0, 0, 2}}) < 1e-14);
  CHECK(max_diff(pred.ell_hat, Vector{-1, 0, 0}) < 1e-14);
  CHECK(max_diff(pred.spray_hat, Vector{-0.5, 0, 0}) < 1e-14);

  auto hat = fhat_model(model);
  auto direct = tensor_bundle(hat, p);
  CHECK(max_diff(direct.g, pred.g_hat) < 1e-13);
  CHECK(max_diff(direct.spray, pred.spray_hat) < 1e-13);
}

TEST_CASE("changed metric tensor matches an independent difference quotient") {
  for (double m : {2.0, 3.0, 0.5, -2.0}) {
    auto model = testing::flat_model(m);
    auto hat = fhat_model(model);
    ChartPoint p{{1.0, 0.4, -0.3}, {-1.2, 0.3, 0.5}};
    INFO("m = " << m);
    CHECK(metric_value(hat, p) == doctest::Approx(flat_hat(p.x, p.y, m)).epsilon(1e-14));
    CHECK(max_diff(metric_tensor(hat, p), fd_metric(p.x, p.y, m)) < 1e-5);
    auto pred = predicted(model, p, context(model, p));
    CHECK(max_diff(pred.g_hat, metric_tensor(hat, p)) < 1e-12);
  }
}

TEST_CASE("invalid exponents and degenerate points") {
  CHECK_THROWS_AS(fhat_model(testing::flat_model(0.0)), InvalidExponent);
  CHECK_THROWS_AS(fhat_model(testing::flat_model(-1.0)), InvalidExponent);
  // phi orthogonal to y: Phi = 0
  CHECK_THROWS_AS(context(testing::flat_model(2.0), ChartPoint{{1, 0, 0}, {0, 1, 0}}), ZeroPhi);
  // m = -2: D = 3 Phi^2 - 2 F^2 |phi|^2 vanishes at cos^2 t = 2/3
  const double t = std::acos(-std::sqrt(2.0 / 3.0));
  ChartPoint p{{1, 0, 0}, {std::cos(t), std::sin(t), 0}};
  CHECK_THROWS_AS(context(testing::flat_model(-2.0), p), DegenerateChange);
}

TEST_CASE("degeneracy scan locates cos^2 t = 2/3") {
  auto model = testing::flat_model(-2.0);
  ScanPath path{{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, 2.2, 2 * M_PI - 2.2, 200};
  auto roots = degeneracy_roots(model, path);
  REQUIRE(roots.size() == 2);
  for (double r : roots) CHECK(std::abs(std::cos(r) * std::cos(r) - 2.0 / 3.0) < 1e-6);
  auto scan = nondegeneracy_scan(model, path, {2.3, roots[0], 3.1});
  REQUIRE(scan.size() == 3);
  // oracle: Phi = -cos t, F = 1, |phi| = 1 -> D = 3 cos^2 t - 2
  CHECK(scan[0].D == doctest::Approx(3 * std::cos(2.3) * std::cos(2.3) - 2));
  CHECK(std::abs(scan[1].det_g_hat) < 1e-8);
  CHECK(std::abs(scan[2].det_g_hat) > 1e-3);
}

TEST_CASE("fhat model adds a positivity guard") {
  auto hat = fhat_model(testing::flat_model(2.0));
  CHECK_FALSE(admissible(hat, ChartPoint{{1, 0, 0}, {1, 0.2, 0}}));
  CHECK(admissible(hat, ChartPoint{{1, 0, 0}, {-1, 0.2, 0}}));
}

TEST_CASE("determinant") {
  CHECK(determinant(Matrix{{2, 1}, {1, 3}}) == doctest::Approx(5.0));
  CHECK(determinant(Matrix{{1, 2}, {2, 4}}) == doctest::Approx(0.0));
}
