#include <doctest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/geometry.hpp"
#include "support.hpp"

using namespace finsler;
using testing::max_diff;

TEST_CASE("flat metric: identity tensor, straight geodesics") {
  auto model = testing::flat_model();
  ChartPoint p{{0.3, -1.0, 2.0}, {1.0, 2.0, -0.5}};
  auto t = tensor_bundle(model, p);
  Matrix I = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(max_diff(t.g, I) < 1e-14);
  CHECK(max_diff(t.spray, Vector(3, 0.0)) < 1e-14);
  CHECK(max_diff(t.nonlinear, Matrix(3, Vector(3, 0.0))) < 1e-14);
  for (const auto& m : t.berwald) CHECK(max_diff(m, Matrix(3, Vector(3, 0.0))) < 1e-14);
  for (const auto& m : t.curvature) CHECK(max_diff(m, Matrix(3, Vector(3, 0.0))) < 1e-14);
  for (const auto& m : t.cartan) CHECK(max_diff(m, Matrix(3, Vector(3, 0.0))) < 1e-14);
}

TEST_CASE("worked example: metric and Cartan tensor at a point") {
  auto model = testing::example_model();
  ChartPoint p{{2, 0, 0}, {1, 2, 1}};
  auto f = fundamental_forms(model, p);
  CHECK(f.g[0][0] == doctest::Approx(1.0));
  CHECK(f.g[1][1] == doctest::Approx(24.0));
  CHECK(f.g[1][2] == doctest::Approx(-24.0));
  CHECK(f.g[2][2] == doctest::Approx(32.0));
  CHECK(std::abs(f.g[0][1]) < 1e-12);
  CHECK(f.cartan[1][1][1] == doctest::Approx(6.0));
  CHECK(f.cartan[1][1][2] == doctest::Approx(-12.0));
  CHECK(f.cartan[1][2][2] == doctest::Approx(24.0));
  CHECK(f.cartan[2][2][2] == doctest::Approx(-48.0));
  CHECK(f.F == doctest::Approx(std::sqrt(33.0)));
}

// Hyperbolic half-plane: Gamma^1_12 = -1/x2, Gamma^2_11 = 1/x2, Gamma^2_22 = -1/x2.
TEST_CASE("hyperbolic plane: spray, connection and curvature") {
  auto model = testing::hyperbolic_model();
  for (const auto& p : {ChartPoint{{0.3, 1.5}, {1.0, 0.5}}, ChartPoint{{-1.0, 0.7}, {-0.4, 2.0}}}) {
    const double u = p.x[1], a = p.y[0], b = p.y[1];
    auto t = tensor_bundle(model, p);
    Vector G = {-a * b / u, 0.5 * (a * a - b * b) / u};
    CHECK(max_diff(t.spray, G) < 1e-12);
    Matrix N = {{-b / u, -a / u}, {a / u, -b / u}};
    CHECK(max_diff(t.nonlinear, N) < 1e-12);
    Tensor3 B = {{{0, -1 / u}, {-1 / u, 0}}, {{1 / u, 0}, {0, -1 / u}}};
    for (int i = 0; i < 2; ++i) CHECK(max_diff(t.berwald[i], B[i]) < 1e-12);
    // constant curvature -1: R^i_jk = -(delta^i_j y_k - delta^i_k y_j), y_k = g_kl y^l
    Vector yl = {a / (u * u), b / (u * u)};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double expect = -((i == j ? yl[k] : 0.0) - (i == k ? yl[j] : 0.0));
          CHECK(t.curvature[i][j][k] == doctest::Approx(expect).epsilon(1e-10));
        }
  }
}

TEST_CASE("horizontal derivative of the position field on flat space") {
  auto model = testing::flat_model();
  ChartPoint p{{1.0, 2.0, 3.0}, {0.5, -0.5, 1.0}};
  std::vector<expr::Ast> V = {expr::parse("x1", 3), expr::parse("x2*x2", 3), expr::parse("y3", 3)};
  auto d = hcov_vector(model, p, V);
  Matrix H = {{1, 0, 0}, {0, 4, 0}, {0, 0, 0}};
  Matrix Vv = {{0, 0, 0}, {0, 0, 0}, {0, 0, 1}};
  CHECK(max_diff(d.horizontal, H) < 1e-14);
  CHECK(max_diff(d.vertical, Vv) < 1e-14);
}

TEST_CASE("model validation and guards") {
  CHECK_THROWS_AS(make_model(2, "bad", "sqrt(y1^2+y2^2)", {"y1", "0"}, {}), DomainError);
  auto model = testing::example_model();
  ChartPoint bad{{2, 0, 0}, {1, 2, 0}};
  CHECK_FALSE(admissible(model, bad));
  CHECK_THROWS_AS(require_admissible(model, bad), GuardViolation);
  ChartPoint zero{{2, 0, 0}, {0, 0, 0}};
  CHECK_FALSE(admissible(testing::flat_model(), zero));
}

TEST_CASE("singular metric is reported") {
  // F = |y1| in two dimensions: g is rank one
  auto model = make_model(2, "degenerate", "sqrt(y1^2)", {}, {"y1"});
  ChartPoint p{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(spray_and_connection(model, p), SingularMetric);
}
