#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/cli.hpp"
#include "finsler/verify.hpp"
#include "support.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "finsler");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = finsler::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("tensors prints the example metric") {
  auto r = run({"tensors", "--config", testing::config_path("example.json"), "--at", "x=2,0,0;y=1,2,1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("24  -24") != std::string::npos);
  CHECK(r.out.find("Phi: 2") != std::string::npos);
  auto j = run({"tensors", "--config", testing::config_path("example.json"), "--at", "x=2,0,0;y=1,2,1", "--json"});
  CHECK(j.code == 0);
  CHECK(j.out.find("\"g\"") != std::string::npos);
}

TEST_CASE("tensors on a flat config gives the identity") {
  auto r = run({"tensors", "--config", testing::config_path("flat-kropina.json"), "--at", "x=1,1,1;y=-1,0.5,2",
                "--json"});
  REQUIRE(r.code == 0);
  auto j = finsler::Json::parse(r.out);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) CHECK(j["g"][i][k].get<double>() == doctest::Approx(i == k ? 1.0 : 0.0));
}

TEST_CASE("exit codes") {
  auto bad_point = run({"tensors", "--config", testing::config_path("example.json"), "--at", "x=2,0,0;y=1,2,0"});
  CHECK(bad_point.code == 1);
  CHECK(bad_point.err.find("guard") != std::string::npos);
  CHECK(run({"verify", "--config", "/nonexistent.json"}).code == 2);
  CHECK(run({"verify", "--config", testing::config_path("invalid-m.json")}).code == 2);
  CHECK(run({"verify"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"verify", "--config", testing::config_path("example.json"), "--sigma", "0"}).code == 2);
  CHECK(run({"check-concurrent", "--config", testing::config_path("flat-kropina.json")}).code == 0);
  CHECK(run({"check-concurrent", "--config", testing::config_path("example-printed-F.json")}).code == 1);
  CHECK(run({"fn-selftest"}).code == 0);
}

TEST_CASE("verify writes a reproducible report") {
  const std::string a = "cli_report_a.json", b = "cli_report_b.json";
  auto r1 = run({"verify", "--config", testing::config_path("flat-kropina.json"), "--out", a});
  auto r2 = run({"verify", "--config", testing::config_path("flat-kropina.json"), "--out", b});
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("\"pass\": true") != std::string::npos);
  std::remove(a.c_str());
  std::remove(b.c_str());

  auto neg = run({"verify", "--config", testing::config_path("example-nonconcurrent.json")});
  CHECK(neg.code == 1);
  auto rep = finsler::Json::parse(neg.out);
  CHECK(rep["checks"][0]["name"] == "concurrency");
  CHECK(rep["checks"][0]["status"] == "fail");
}
