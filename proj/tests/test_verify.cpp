#include <doctest.h>

#include "finsler/config.hpp"
#include "finsler/errors.hpp"
#include "finsler/verify.hpp"
#include "support.hpp"

using namespace finsler;

namespace {

SuiteOptions flat_options(int count = 20) {
  SuiteOptions o;
  o.sample.box = {{0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}, {-1.5, -0.5}, {-1.5, -0.5}, {-1.5, -0.5}};
  o.sample.count = count;
  o.sample.seed = 5;
  o.curvature_points = 5;
  return o;
}

}  // namespace

TEST_CASE("sampling is deterministic and honours guards") {
  SampleSpec spec;
  spec.box = {{0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}};
  spec.count = 10;
  auto a = sample(testing::flat_model(), spec);
  auto b = sample(testing::flat_model(), spec);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
  spec.seed = 2;
  CHECK(sample(testing::flat_model(), spec)[0].x != a[0].x);

  // guard y3 > 0 on y3 in [-1, 1]: about half accepted
  SampleSpec half = spec;
  half.box[5] = {-1.0, 1.0};
  half.count = 400;
  half.guard_margin = 0.0;
  auto model = make_model(3, "half", "sqrt(y1^2 + y2^2 + y3^2)", {}, {"y3"});
  half.max_attempts = 600;
  CHECK_THROWS_AS(sample(model, half), AcceptanceTooLow);
  half.max_attempts = 1000;
  CHECK(sample(model, half).size() == 400);

  auto never = make_model(3, "never", "sqrt(y1^2 + y2^2 + y3^2)", {}, {"x1 - 10"});
  spec.max_attempts = 1000;
  CHECK_THROWS_AS(sample(never, spec), AcceptanceTooLow);
}

TEST_CASE("suite on the flat model passes and is reproducible") {
  auto o = flat_options();
  o.checks = {"kropina-metric", "barthel", "curvature", "not-concurrent"};
  auto rep = run_suite(testing::flat_model(2.0), o, Json::object());
  REQUIRE(rep.checks.size() == 5);
  CHECK(rep.checks[0].name == "concurrency");
  CHECK(rep.pass);
  auto again = run_suite(testing::flat_model(2.0), o, Json::object());
  CHECK(to_json(rep).dump() == to_json(again).dump());
}

TEST_CASE("the opposite connection-change sign fails") {
  auto o = flat_options();
  o.sigma = -1.0;
  o.checks = {"barthel"};
  auto rep = run_suite(testing::flat_model(2.0), o, Json::object());
  CHECK_FALSE(rep.pass);
  CHECK(rep.checks[1].status == "fail");
  CHECK(rep.checks[1].max_rel_err > 1e-2);
}

TEST_CASE("non-concurrent field gates the change checks") {
  auto model = make_model(3, "nc", "sqrt(y1^2 + y2^2 + y3^2)", {"0", "x2", "0"}, {}, 2.0);
  auto o = flat_options();
  o.checks = {"fundamental", "kropina-metric"};
  auto rep = run_suite(model, o, Json::object());
  CHECK_FALSE(rep.pass);
  CHECK(rep.checks[0].status == "fail");
  CHECK(rep.checks[1].status == "pass");
  CHECK(rep.checks[2].status == "precondition-failed");
}

TEST_CASE("unknown check") {
  SuiteState s(testing::flat_model(), flat_options());
  CHECK_THROWS_AS(run_check("no-such-check", s), UnknownCheck);
}

TEST_CASE("config parsing") {
  auto base = Json::parse(R"j({
    "dimension": 2, "metric": "sqrt(y1^2 + y2^2)", "vector_field": ["-x1", "-x2"], "m": 2,
    "sample": {"box": [[0.5, 1], [0.5, 1], [-1, -0.5], [-1, -0.5]]}
  })j");
  auto cfg = parse_config(base);
  CHECK(cfg.model.dim == 2);
  CHECK(cfg.options.sample.count == 100);
  CHECK(cfg.options.sigma == 1.0);
  CHECK(std::find(cfg.options.checks.begin(), cfg.options.checks.end(), "nondegeneracy") == cfg.options.checks.end());

  for (const char* patch : {R"j({"m": 0})j", R"j({"m": -1})j", R"j({"checks": ["bogus"]})j", R"j({"sigma": 2})j",
                            R"j({"metric": "sqrt(y1^2 +"})j", R"j({"vector_field": ["y1", "0"]})j",
                            R"j({"sample": {"box": [[0, 1]]}})j", R"j({"checks": ["nondegeneracy"]})j",
                            R"j({"colour": "blue"})j"}) {
    INFO(patch);
    Json j = base;
    j.merge_patch(Json::parse(patch));
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("point syntax") {
  auto p = parse_point("x=2,0,0;y=1,2,1", 3);
  CHECK(p.x == Vector{2, 0, 0});
  CHECK(p.y == Vector{1, 2, 1});
  CHECK_THROWS_AS(parse_point("x=2,0;y=1,2,1", 3), ConfigError);
  CHECK_THROWS_AS(parse_point("x=2,0,0", 3), ConfigError);
  CHECK_THROWS_AS(parse_point("x=2,a,0;y=1,2,1", 3), ConfigError);
}

TEST_CASE("bundled configs load") {
  for (const char* name : {"example.json", "example-printed-F.json", "flat-kropina.json", "flat-degenerate.json",
                           "example-nonconcurrent.json"})
    CHECK_NOTHROW(load_config(testing::config_path(name)));
  CHECK_THROWS_AS(load_config(testing::config_path("invalid-m.json")), ConfigError);
}
