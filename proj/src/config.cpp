#include "finsler/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

void only_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
  return v;
}

int integer(const Json& j, const std::string& what, int min) {
  if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
  const auto v = j.get<long long>();
  if (v < min || v > 100000000) throw ConfigError(what + " is out of range");
  return static_cast<int>(v);
}

double positive(const Json& j, const std::string& what) {
  double v = number(j, what);
  if (!(v > 0)) throw ConfigError(what + " must be positive");
  return v;
}

std::vector<std::string> strings(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ConfigError(what + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Vector numbers(const Json& j, const std::string& what, std::size_t size) {
  if (!j.is_array() || j.size() != size)
    throw ConfigError(what + " must be an array of " + std::to_string(size) + " numbers");
  Vector out;
  for (const auto& e : j) out.push_back(number(e, what));
  return out;
}

SampleSpec parse_sample(const Json& j, int dim) {
  only_keys(j, "sample", {"box", "count", "seed", "max_attempts", "guard_margin"});
  SampleSpec s;
  if (!j.contains("box")) throw ConfigError("sample.box is required");
  const Json& box = j["box"];
  if (!box.is_array() || box.size() != static_cast<std::size_t>(2 * dim))
    throw ConfigError("sample.box needs " + std::to_string(2 * dim) + " intervals (x first, then y)");
  for (const auto& iv : box) {
    Vector b = numbers(iv, "sample.box interval", 2);
    if (b[0] > b[1]) throw ConfigError("sample.box interval has min > max");
    s.box.emplace_back(b[0], b[1]);
  }
  if (j.contains("count")) s.count = integer(j["count"], "sample.count", 1);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ConfigError("sample.seed must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("max_attempts")) s.max_attempts = integer(j["max_attempts"], "sample.max_attempts", 1);
  if (j.contains("guard_margin")) {
    s.guard_margin = number(j["guard_margin"], "sample.guard_margin");
    if (s.guard_margin < 0) throw ConfigError("sample.guard_margin must be non-negative");
  }
  return s;
}

Tolerances parse_tolerances(const Json& j) {
  only_keys(j, "tolerances", {"abs", "rel", "algebraic", "identity", "concurrency", "fd", "kropina_margin"});
  Tolerances t;
  if (j.contains("abs")) t.abs = positive(j["abs"], "tolerances.abs");
  if (j.contains("rel")) t.rel = positive(j["rel"], "tolerances.rel");
  if (j.contains("algebraic")) t.algebraic = positive(j["algebraic"], "tolerances.algebraic");
  if (j.contains("identity")) t.identity = positive(j["identity"], "tolerances.identity");
  if (j.contains("concurrency")) t.concurrency = positive(j["concurrency"], "tolerances.concurrency");
  if (j.contains("fd")) t.fd = positive(j["fd"], "tolerances.fd");
  if (j.contains("kropina_margin")) {
    t.kropina_margin = number(j["kropina_margin"], "tolerances.kropina_margin");
    if (t.kropina_margin < 0 || t.kropina_margin >= 1) throw ConfigError("tolerances.kropina_margin must be in [0,1)");
  }
  return t;
}

NondegeneracyOptions parse_nondegeneracy(const Json& j, int dim) {
  only_keys(j, "nondegeneracy", {"x", "u", "v", "t", "steps", "d_tol", "det_tol", "d_far", "det_floor"});
  NondegeneracyOptions o;
  for (const char* k : {"x", "u", "v", "t"})
    if (!j.contains(k)) throw ConfigError(std::string("nondegeneracy.") + k + " is required");
  o.path.x = numbers(j["x"], "nondegeneracy.x", dim);
  o.path.u = numbers(j["u"], "nondegeneracy.u", dim);
  o.path.v = numbers(j["v"], "nondegeneracy.v", dim);
  Vector t = numbers(j["t"], "nondegeneracy.t", 2);
  if (!(t[0] < t[1])) throw ConfigError("nondegeneracy.t must be an increasing interval");
  o.path.t0 = t[0];
  o.path.t1 = t[1];
  if (j.contains("steps")) o.path.steps = integer(j["steps"], "nondegeneracy.steps", 2);
  if (j.contains("d_tol")) o.d_tol = positive(j["d_tol"], "nondegeneracy.d_tol");
  if (j.contains("det_tol")) o.det_tol = positive(j["det_tol"], "nondegeneracy.det_tol");
  if (j.contains("d_far")) o.d_far = positive(j["d_far"], "nondegeneracy.d_far");
  if (j.contains("det_floor")) o.det_floor = positive(j["det_floor"], "nondegeneracy.det_floor");
  return o;
}

}  // namespace

Config parse_config(const Json& j) {
  only_keys(j, "config",
            {"name", "dimension", "metric", "vector_field", "m", "domain", "sample", "tolerances", "checks", "sigma",
             "phi_sign_normalization", "nondegeneracy", "curvature_points", "berwald_fields", "fd_points",
             "selftest_points"});
  for (const char* k : {"dimension", "metric", "sample"})
    if (!j.contains(k)) throw ConfigError(std::string(k) + " is required");
  const int dim = integer(j["dimension"], "dimension", 1);
  if (dim > 8) throw ConfigError("dimension must be at most 8");
  if (!j["metric"].is_string()) throw ConfigError("metric must be a string");
  const std::string name = j.contains("name") ? j["name"].get<std::string>() : std::string("model");
  std::vector<std::string> phi, domain;
  if (j.contains("vector_field")) {
    phi = strings(j["vector_field"], "vector_field");
    if (phi.size() != static_cast<std::size_t>(dim))
      throw ConfigError("vector_field needs " + std::to_string(dim) + " components");
  }
  if (j.contains("domain")) domain = strings(j["domain"], "domain");
  double m = 1.0;
  if (j.contains("m")) m = number(j["m"], "m");
  if (m == 0.0 || m == -1.0) throw ConfigError("m must differ from 0 and -1");

  Config c;
  try {
    c.model = make_model(dim, name, j["metric"].get<std::string>(), phi, domain, m);
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }

  auto& o = c.options;
  o.sample = parse_sample(j["sample"], dim);
  if (j.contains("tolerances")) o.tolerances = parse_tolerances(j["tolerances"]);
  if (j.contains("sigma")) {
    double s = number(j["sigma"], "sigma");
    if (s != 1.0 && s != -1.0) throw ConfigError("sigma must be +1 or -1");
    o.sigma = s;
  }
  if (j.contains("phi_sign_normalization")) {
    if (!j["phi_sign_normalization"].is_boolean()) throw ConfigError("phi_sign_normalization must be a boolean");
    o.phi_sign_normalization = j["phi_sign_normalization"].get<bool>();
  }
  if (j.contains("nondegeneracy")) o.nondegeneracy = parse_nondegeneracy(j["nondegeneracy"], dim);
  if (j.contains("curvature_points")) o.curvature_points = integer(j["curvature_points"], "curvature_points", 1);
  if (j.contains("berwald_fields")) o.berwald_fields = integer(j["berwald_fields"], "berwald_fields", 1);
  if (j.contains("fd_points")) o.fd_points = integer(j["fd_points"], "fd_points", 1);
  if (j.contains("selftest_points")) o.selftest_points = integer(j["selftest_points"], "selftest_points", 1);

  if (j.contains("checks")) {
    o.checks = strings(j["checks"], "checks");
    const auto& known = known_checks();
    for (const auto& name : o.checks)
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError("unknown check '" + name + "'");
  } else {
    for (const auto& name : known_checks()) {
      if (phi.empty() && (is_kropina_check(name) || name == "lemma" || name == "concurrency")) continue;
      if (name == "nondegeneracy" && !o.nondegeneracy) continue;
      o.checks.push_back(name);
    }
  }
  for (const auto& name : o.checks) {
    if (phi.empty() && (is_kropina_check(name) || name == "lemma" || name == "concurrency"))
      throw ConfigError("check '" + name + "' needs a vector_field");
    if (name == "nondegeneracy" && !o.nondegeneracy) throw ConfigError("check 'nondegeneracy' needs a scan path");
  }

  c.echo = Json::object();
  c.echo["name"] = name;
  c.echo["dimension"] = dim;
  c.echo["metric"] = j["metric"];
  c.echo["vector_field"] = phi;
  c.echo["m"] = m;
  c.echo["domain"] = domain;
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ChartPoint parse_point(const std::string& text, int dim) {
  ChartPoint p{Vector(dim, 0.0), Vector(dim, 0.0)};
  bool seen_x = false, seen_y = false;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, ';')) {
    part.erase(std::remove_if(part.begin(), part.end(), [](unsigned char ch) { return std::isspace(ch); }),
               part.end());
    if (part.size() < 2 || part[1] != '=' || (part[0] != 'x' && part[0] != 'y'))
      throw ConfigError("point must look like x=...;y=...");
    Vector& target = part[0] == 'x' ? p.x : p.y;
    (part[0] == 'x' ? seen_x : seen_y) = true;
    std::stringstream comps(part.substr(2));
    std::string c;
    int i = 0;
    while (std::getline(comps, c, ',')) {
      if (i >= dim) throw ConfigError("point has more than " + std::to_string(dim) + " components");
      try {
        std::size_t used = 0;
        target[i] = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw ConfigError("bad point component '" + c + "'");
      }
      ++i;
    }
    if (i != dim) throw ConfigError("point needs " + std::to_string(dim) + " components per part");
  }
  if (!seen_x || !seen_y) throw ConfigError("point must give both x and y");
  return p;
}

}  // namespace finsler
