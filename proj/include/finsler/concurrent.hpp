#pragma once

// Concurrency of the model's vector field phi and the scalars built from it.
//
// phi is concurrent when its Berwald horizontal derivative is c times the
// identity with |c| = 1 and its vertical derivative vanishes. The sign c is
// measured, not assumed.

#include <map>
#include <string>
#include <vector>

#include "finsler/geometry.hpp"

namespace finsler {

struct PhiScalars {
  Vector phi_form;  // phi_i = g_ij phi^j
  double Phi = 0;   // phi_i y^i
  double norm_sq = 0;
  Jet Phi_jet;
  Jet norm_sq_jet;
};

/// Jets of phi_i, Phi and |phi|^2 over a local geometry (order K-2).
struct PhiJets {
  std::vector<Jet> phi;       // phi^i
  std::vector<Jet> phi_form;  // phi_i
  Jet Phi;
  Jet norm_sq;
};

PhiJets phi_contractions(const LocalGeometry& geo, const FinslerModel& model);
PhiScalars phi_scalars(const FinslerModel& model, const ChartPoint& p);

struct ConcurrencyReport {
  double c = 0;
  double h_residual = 0;
  double v_residual = 0;
  double cartan_contraction = 0;
  int points_checked = 0;
  ChartPoint worst_point;
  bool pass = false;
};

/// Concurrency verdict over a sample. `tol` bounds h_residual and ||c|-1|.
ConcurrencyReport check_concurrent(const FinslerModel& model, const std::vector<ChartPoint>& sample,
                                   double tol = 1e-8);

/// Residuals of the scalar identities satisfied by a concurrent field with
/// horizontal constant c. Keys name the identity; values are scaled by
/// max(1, |terms|).
std::map<std::string, double> field_identities(const FinslerModel& model, const ChartPoint& p,
                                          double c = -1.0);

/// Copy of the model with phi replaced by sign * phi.
FinslerModel with_phi_sign(const FinslerModel& model, double sign);

}  // namespace finsler
