#include <doctest.h>

#include <cmath>

#include "finsler/concurrent.hpp"
#include "finsler/errors.hpp"
#include "support.hpp"

using namespace finsler;

namespace {

std::vector<ChartPoint> grid(double ysign) {
  std::vector<ChartPoint> pts;
  for (double a : {0.6, 1.1, 1.7})
    for (double b : {-0.7, 0.4})
      for (double c : {0.6, 1.4}) pts.push_back(ChartPoint{{a, b, -b}, {ysign * (0.5 + a / 2), c, 2.0 - c / 2}});
  return pts;
}

}  // namespace

TEST_CASE("flat space: the negative position field is concurrent with c = -1") {
  auto rep = check_concurrent(testing::flat_model(), grid(-1.0));
  CHECK(rep.pass);
  CHECK(rep.c == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(rep.h_residual <= 1e-12);
  CHECK(rep.points_checked == 12);
}

TEST_CASE("flat space: a parallel field is not concurrent") {
  auto model = make_model(3, "flat", "sqrt(y1^2 + y2^2 + y3^2)", {"1", "0", "0"}, {});
  auto rep = check_concurrent(model, grid(1.0));
  CHECK_FALSE(rep.pass);
  CHECK(std::abs(rep.c) < 1e-14);
}

TEST_CASE("worked example: c = +1 and Phi = x1 y1") {
  auto model = testing::example_model();
  auto pts = grid(1.0);
  auto rep = check_concurrent(model, pts);
  CHECK(rep.pass);
  CHECK(rep.c == doctest::Approx(1.0));
  CHECK(rep.cartan_contraction < 1e-10);
  for (const auto& p : pts) {
    auto s = phi_scalars(model, p);
    CHECK(s.Phi == doctest::Approx(p.x[0] * p.y[0]).epsilon(1e-12));
    CHECK(s.norm_sq == doctest::Approx(p.x[0] * p.x[0]).epsilon(1e-12));
  }
}

TEST_CASE("sign flip negates c") {
  auto model = with_phi_sign(testing::example_model(), -1.0);
  auto rep = check_concurrent(model, grid(1.0));
  CHECK(rep.c == doctest::Approx(-1.0));
  auto s = phi_scalars(model, ChartPoint{{2, 0, 0}, {1, 2, 1}});
  CHECK(s.Phi == doctest::Approx(-2.0));
}

TEST_CASE("scalar identities vanish for concurrent fields") {
  for (const auto& p : grid(1.0)) {
    for (const auto& [name, res] : field_identities(testing::example_model(), p, 1.0)) {
      INFO(name);
      CHECK(res < 1e-10);
    }
  }
  for (const auto& p : grid(-1.0))
    for (const auto& [name, res] : field_identities(testing::flat_model(), p, -1.0)) {
      INFO(name);
      CHECK(res < 1e-12);
    }
}

TEST_CASE("no admissible points and missing field") {
  std::vector<ChartPoint> bad = {ChartPoint{{2, 0, 0}, {1, 2, -1}}};
  CHECK_THROWS_AS(check_concurrent(testing::example_model(), bad), NoAdmissiblePoints);
  auto plain = testing::hyperbolic_model();
  CHECK_THROWS_AS(phi_scalars(plain, ChartPoint{{0, 1}, {1, 0}}), DomainError);
}
