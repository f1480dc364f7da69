#pragma once

// Sampling, identity checks and the verification report.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "finsler/kropina.hpp"

namespace finsler {

using Json = nlohmann::ordered_json;

struct SampleSpec {
  /// 2n intervals, x first then y.
  std::vector<std::pair<double, double>> box;
  int count = 100;
  std::uint64_t seed = 1;
  int max_attempts = 100000;
  double guard_margin = 1e-3;
};

struct Tolerances {
  double abs = 1e-10;
  double rel = 1e-6;         // identities through fourth derivatives
  double algebraic = 1e-8;   // assemblies and first-order identities
  double identity = 1e-9;    // fundamental-form invariants
  double concurrency = 1e-8;
  double fd = 1e-4;
  /// Kropina samples keep |D| above this fraction of its scale.
  double kropina_margin = 0.05;
};

struct NondegeneracyOptions {
  ScanPath path;
  double d_tol = 1e-4;     // |D| < d_tol * scale counts as degenerate
  double det_tol = 1e-4;   // ... and then |det g^| must be below this
  double d_far = 0.1;      // |D| > d_far * scale counts as non-degenerate
  double det_floor = 1e-3; // ... and then |det g^| must exceed this
};

struct SuiteOptions {
  SampleSpec sample;
  Tolerances tolerances;
  std::vector<std::string> checks;
  double sigma = 1.0;
  bool phi_sign_normalization = true;
  std::optional<NondegeneracyOptions> nondegeneracy;
  int curvature_points = 25;
  int berwald_fields = 3;
  int fd_points = 5;
  int selftest_points = 10;
};

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | precondition-failed | error
  int points_evaluated = 0;
  double max_abs_err = 0;
  double max_rel_err = 0;
  double tolerance = 0;
  std::optional<ChartPoint> worst_point;
  bool pass = false;
  Json notes = Json::object();
};

struct VerificationReport {
  Json model;
  Tolerances tolerances;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool pass = false;
};

/// Uniform rejection sampling in the box; deterministic in the seed.
/// Throws AcceptanceTooLow.
std::vector<ChartPoint> sample(const FinslerModel& model, const SampleSpec& spec);

/// Every check name, in the default run order.
const std::vector<std::string>& known_checks();
bool is_kropina_check(const std::string& name);

/// Shared state of one suite run; caches per-point computations.
class SuiteState {
 public:
  SuiteState(FinslerModel model, SuiteOptions options);

  const FinslerModel& model() const { return model_; }
  const SuiteOptions& options() const { return options_; }
  const std::vector<ChartPoint>& points();

  /// Runs the concurrency gate once; later Kropina checks depend on it.
  const CheckResult& concurrency();
  bool concurrent();
  double c() { concurrency(); return c_; }
  /// Model with phi normalized to c = -1.
  const FinslerModel& kropina_model();
  const FinslerModel& hatted_model();
  const std::vector<ChartPoint>& kropina_points();

  struct KropinaPoint {
    ChartPoint p;
    LocalGeometry base;  // order 5
    KropinaJets jets;
    KropinaContext ctx;
    PredictedTensors predicted;
    std::optional<LocalGeometry> hatted;  // order 4, built lazily
  };
  KropinaPoint& kropina_point(std::size_t i);
  const LocalGeometry& hatted(std::size_t i);

 private:
  FinslerModel model_;
  SuiteOptions options_;
  std::optional<std::vector<ChartPoint>> points_;
  std::optional<CheckResult> concurrency_;
  double c_ = 0;
  std::optional<FinslerModel> kmodel_;
  std::optional<FinslerModel> hat_;
  std::optional<std::vector<ChartPoint>> kpoints_;
  std::vector<std::optional<KropinaPoint>> kcache_;
};

/// Throws UnknownCheck.
CheckResult run_check(const std::string& name, SuiteState& state);
VerificationReport run_suite(const FinslerModel& model, const SuiteOptions& options, Json model_echo);

/// Self-tests of the FN calculus on a model at the given points.
CheckResult fn_selftest(const FinslerModel& model, const std::vector<ChartPoint>& points,
                        const FinslerModel* hatted, std::uint64_t seed, double tol);

Json to_json(const ChartPoint& p);
Json to_json(const CheckResult& r);
Json to_json(const VerificationReport& r);

}  // namespace finsler
