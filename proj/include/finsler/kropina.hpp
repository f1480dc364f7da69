#pragma once

// The change F^ = F^(m+1) Phi^(-m) of a metric F carrying a concurrent field
// phi, Phi = g(phi, y), and the closed forms of the changed geometry written in
// terms of the original one.
//
// All closed forms assume the concurrency sign c = -1 (D phi = -identity).
// A model whose field has c = +1 must be passed through with_phi_sign(-1)
// first.

#include <vector>

#include "finsler/concurrent.hpp"
#include "finsler/fn_calculus.hpp"
#include "finsler/geometry.hpp"

namespace finsler {

/// Metric function F^(m+1) Phi^(-m) evaluated through the jets of F.
class HattedMetric final : public MetricFunction {
 public:
  HattedMetric(FinslerModel base, double m);
  Jet evaluate(const ChartPoint& p, int order) const override;
  std::string describe() const override;

 private:
  FinslerModel base_;
  double m_;
};

/// Phi = phi^i dF^2/dy^i / 2 as a jet of the given order.
Jet kropina_phi(const FinslerModel& model, const ChartPoint& p, int order);

/// The changed model: hatted metric, same field, guards extended by Phi > 0.
FinslerModel fhat_model(const FinslerModel& model);

struct KropinaContext {
  double m = 0;
  double F = 0;
  double Phi = 0;
  double norm_sq = 0;
  double D = 0;
  double D_scale = 0;  // |m| F^2 |phi|^2 + |m-1| Phi^2
  double Psi1 = 0;
  double Psi2 = 0;
  double sigma = 1.0;
};

/// Jets of the change apparatus over a local geometry of order K: F to K,
/// ell to K-1, everything built from g to K-2.
struct KropinaJets {
  double m;
  Jet F;
  std::vector<Jet> phi;
  std::vector<Jet> phi_form;
  std::vector<Jet> ell;
  Jet Phi;
  Jet norm_sq;
  Jet D;
  Jet Psi1;
  Jet Psi2;
};

KropinaJets kropina_jets(const LocalGeometry& geo, const FinslerModel& model);

/// Scalars at a point without the non-degeneracy checks; Psi1 and Psi2 are
/// left at zero when D vanishes.
KropinaContext raw_context(const FinslerModel& model, const ChartPoint& p);
/// Scalars at a point. Throws ZeroPhi or DegenerateChange.
KropinaContext context(const FinslerModel& model, const ChartPoint& p, double sigma = 1.0);
KropinaContext context(const KropinaJets& kj, double sigma = 1.0);

struct PredictedTensors {
  Vector ell_hat;
  Matrix hbar_hat;
  Matrix g_hat;
  Tensor3 cartan_hat;
  Vector spray_hat;
  Matrix nonlinear_hat;
  Matrix FF;  // FF[i][j]: y-component i of the connection change on d/dx^j
  double zeta_hat = 0;
  Matrix a_hat;
};

PredictedTensors predicted(const FinslerModel& model, const ChartPoint& p, const KropinaContext& ctx);
/// Same, from an existing geometry of order >= 3.
PredictedTensors predicted(const LocalGeometry& geo, const KropinaJets& kj, const KropinaContext& ctx);

/// Connection change as a vector 1-form on TM with jet entries of order K-3.
fn::Form barthel_change_form(const LocalGeometry& geo, const KropinaJets& kj, double sigma = 1.0);

/// Predicted hatted Berwald horizontal derivative of a pi-vector field Y
/// (jets over geo's chart): [i][j] = Y^i_{^|j}. Needs geo order >= 4.
Matrix predicted_berwald_horizontal(const LocalGeometry& geo, const KropinaJets& kj,
                                    const std::vector<Jet>& Y);

/// y(t) = cos(t) u + sin(t) v at fixed x.
struct ScanPath {
  Vector x;
  Vector u;
  Vector v;
  double t0 = 0;
  double t1 = 0;
  int steps = 100;
  ChartPoint at(double t) const;
};

struct ScanSample {
  double t = 0;
  double D = 0;
  double D_scale = 0;
  double det_g_hat = 0;
};

/// (t, D, det g^) along the path, computed directly from the hatted model.
/// Points that are inadmissible or have Phi = 0 are skipped.
std::vector<ScanSample> nondegeneracy_scan(const FinslerModel& model, const ScanPath& path);
std::vector<ScanSample> nondegeneracy_scan(const FinslerModel& model, const ScanPath& path,
                                           const std::vector<double>& ts);
/// Parameters where D changes sign along the path, refined by bisection.
std::vector<double> degeneracy_roots(const FinslerModel& model, const ScanPath& path);

double determinant(Matrix a);

}  // namespace finsler
