#include "finsler/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "finsler/config.hpp"
#include "finsler/errors.hpp"

namespace finsler::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void print_vector(std::ostream& out, const std::string& name, const Vector& v) {
  out << name << ":";
  for (double x : v) out << "  " << fmt(x);
  out << "\n";
}

void print_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << name << ":\n";
  for (const auto& row : m) {
    out << "  ";
    for (double x : row) out << "  " << fmt(x);
    out << "\n";
  }
}

void print_tensor(std::ostream& out, const std::string& name, const Tensor3& t, const std::string& slice) {
  for (std::size_t i = 0; i < t.size(); ++i) print_matrix(out, name + "[" + slice + "=" + std::to_string(i + 1) + "]", t[i]);
}

Json json_vector(const Vector& v) { return Json(v); }
Json json_matrix(const Matrix& m) { return Json(m); }
Json json_tensor(const Tensor3& t) { return Json(t); }

FinslerModel builtin_example() {
  return make_model(3, "example", "sqrt(y1^2 + x1^2*y2^3/y3)", {"x1", "0", "0"},
                    {"x1", "y2", "y3", "y1^2 + x1^2*y2^3/y3"}, 2.0);
}

int cmd_tensors(const std::string& config_path, const std::string& at, bool as_json, std::ostream& out) {
  Config cfg = load_config(config_path);
  const FinslerModel& model = cfg.model;
  ChartPoint p = parse_point(at, model.dim);
  require_admissible(model, p);
  TensorBundle t = tensor_bundle(model, p);
  std::optional<KropinaContext> kc;
  if (static_cast<int>(model.phi.size()) == model.dim) kc = raw_context(model, p);

  if (as_json) {
    Json j = Json::object();
    j["model"] = cfg.echo;
    j["point"] = to_json(p);
    j["F"] = t.F;
    j["g"] = json_matrix(t.g);
    j["g_inv"] = json_matrix(t.g_inv);
    j["ell"] = json_vector(t.ell);
    j["hbar"] = json_matrix(t.hbar);
    j["cartan"] = json_tensor(t.cartan);
    j["spray"] = json_vector(t.spray);
    j["nonlinear"] = json_matrix(t.nonlinear);
    j["berwald"] = json_tensor(t.berwald);
    j["curvature"] = json_tensor(t.curvature);
    if (kc) {
      j["Phi"] = kc->Phi;
      j["phi_norm_sq"] = kc->norm_sq;
      j["D"] = kc->D;
      j["Psi1"] = kc->Psi1;
      j["Psi2"] = kc->Psi2;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "model: " << model.name << "\n";
  print_vector(out, "x", p.x);
  print_vector(out, "y", p.y);
  out << "F: " << fmt(t.F) << "\n";
  print_matrix(out, "g", t.g);
  print_matrix(out, "g_inv", t.g_inv);
  print_vector(out, "ell", t.ell);
  print_matrix(out, "hbar", t.hbar);
  print_tensor(out, "C", t.cartan, "i");
  print_vector(out, "G", t.spray);
  print_matrix(out, "N", t.nonlinear);
  print_tensor(out, "Berwald", t.berwald, "i");
  print_tensor(out, "R", t.curvature, "i");
  if (kc) {
    out << "Phi: " << fmt(kc->Phi) << "\n";
    out << "|phi|^2: " << fmt(kc->norm_sq) << "\n";
    out << "D: " << fmt(kc->D) << "\n";
    out << "Psi1: " << fmt(kc->Psi1) << "\n";
    out << "Psi2: " << fmt(kc->Psi2) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& out_path, const std::string& sigma,
               std::ostream& out, std::ostream& err) {
  Config cfg = load_config(config_path);
  if (!sigma.empty()) {
    if (sigma == "+1" || sigma == "1")
      cfg.options.sigma = 1.0;
    else if (sigma == "-1")
      cfg.options.sigma = -1.0;
    else
      throw ConfigError("--sigma must be +1 or -1");
  }
  VerificationReport rep = run_suite(cfg.model, cfg.options, cfg.echo);
  const std::string text = to_json(rep).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write report to '" + out_path + "'");
    f << text;
  }
  std::ostream& summary = out_path.empty() ? err : out;
  for (const auto& c : rep.checks)
    summary << (c.pass ? "PASS " : "FAIL ") << c.name << "  status=" << c.status << "  points=" << c.points_evaluated
            << "  max_rel_err=" << fmt(c.max_rel_err) << "  tol=" << fmt(c.tolerance) << "\n";
  summary << (rep.pass ? "overall: PASS" : "overall: FAIL") << "\n";
  return rep.pass ? kExitOk : kExitFailure;
}

int cmd_check_concurrent(const std::string& config_path, std::ostream& out) {
  Config cfg = load_config(config_path);
  if (static_cast<int>(cfg.model.phi.size()) != cfg.model.dim) throw ConfigError("config has no vector_field");
  auto pts = sample(cfg.model, cfg.options.sample);
  auto rep = check_concurrent(cfg.model, pts, cfg.options.tolerances.concurrency);
  out << "points: " << rep.points_checked << "\n";
  out << "c: " << fmt(rep.c) << "\n";
  out << "h_residual: " << fmt(rep.h_residual) << "\n";
  out << "v_residual: " << fmt(rep.v_residual) << "\n";
  out << "cartan_contraction: " << fmt(rep.cartan_contraction) << "\n";
  out << "verdict: " << (rep.pass ? "concurrent" : "not concurrent") << "\n";
  return rep.pass ? kExitOk : kExitFailure;
}

int cmd_fn_selftest(const std::string& config_path, std::ostream& out) {
  FinslerModel model;
  SampleSpec spec;
  std::uint64_t seed = 1;
  double tol = Tolerances{}.identity;
  int count = 10;
  if (config_path.empty()) {
    model = builtin_example();
    spec.box = {{0.5, 2}, {-1, 1}, {-1, 1}, {0.5, 2}, {0.5, 2}, {0.5, 2}};
  } else {
    Config cfg = load_config(config_path);
    model = cfg.model;
    spec = cfg.options.sample;
    seed = spec.seed;
    tol = cfg.options.tolerances.identity;
    count = cfg.options.selftest_points;
  }
  spec.count = count;
  auto pts = sample(model, spec);
  std::optional<FinslerModel> hat;
  if (static_cast<int>(model.phi.size()) == model.dim) hat = fhat_model(model);
  CheckResult r = fn_selftest(model, pts, hat ? &*hat : nullptr, seed + 3, tol);
  out << (r.pass ? "PASS" : "FAIL") << " fn-selftest  points=" << r.points_evaluated
      << "  max_rel_err=" << fmt(r.max_rel_err) << "  tol=" << fmt(r.tolerance) << "\n";
  if (r.notes.contains("max_rel_err_by_identity"))
    for (const auto& [k, v] : r.notes["max_rel_err_by_identity"].items())
      out << "  " << k << ": " << fmt(v.get<double>()) << "\n";
  return r.pass ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finsler geometry engine and change-of-metric verifier", "finsler"};
  app.require_subcommand(1);

  std::string config, out_path, sigma, at, selftest_config;
  bool as_json = false;

  auto* verify = app.add_subcommand("verify", "Run the identity checks of a config");
  verify->add_option("--config", config, "Config file")->required();
  verify->add_option("--out", out_path, "Report path (default: stdout)");
  verify->add_option("--sigma", sigma, "Override the sign of the connection-change term (+1 or -1)");

  auto* tensors = app.add_subcommand("tensors", "Print the geometric tensors at a point");
  tensors->add_option("--config", config, "Config file")->required();
  tensors->add_option("--at", at, "Point, e.g. \"x=2,0,0;y=1,2,1\"")->required();
  tensors->add_flag("--json", as_json, "JSON output");

  auto* concurrent = app.add_subcommand("check-concurrent", "Test the vector field for concurrency");
  concurrent->add_option("--config", config, "Config file")->required();

  auto* selftest = app.add_subcommand("fn-selftest", "Self-test the bracket calculus");
  selftest->add_option("--config", selftest_config, "Config file (default: built-in model)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (verify->parsed()) return cmd_verify(config, out_path, sigma, out, err);
    if (tensors->parsed()) return cmd_tensors(config, at, as_json, out);
    if (concurrent->parsed()) return cmd_check_concurrent(config, out);
    if (selftest->parsed()) return cmd_fn_selftest(selftest_config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace finsler::cli
