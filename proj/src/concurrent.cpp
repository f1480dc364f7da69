#include "finsler/concurrent.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

PhiJets phi_contractions(const LocalGeometry& geo, const FinslerModel& model) {
  const int n = geo.dim();
  if (static_cast<int>(model.phi.size()) != n) throw DomainError("model has no vector field");
  std::vector<Jet> phi = phi_jets(model, geo.chart());
  const auto& g = geo.g();
  std::vector<Jet> form;
  for (int i = 0; i < n; ++i) {
    Jet s = constant_like(g[i][0], 0.0);
    for (int j = 0; j < n; ++j) s += g[i][j] * phi[j];
    form.push_back(s);
  }
  Jet Phi = constant_like(form[0], 0.0);
  Jet norm = constant_like(form[0], 0.0);
  for (int i = 0; i < n; ++i) {
    Phi += form[i] * geo.y(i);
    norm += form[i] * phi[i];
  }
  return PhiJets{std::move(phi), std::move(form), std::move(Phi), std::move(norm)};
}

PhiScalars phi_scalars(const FinslerModel& model, const ChartPoint& p) {
  require_admissible(model, p);
  LocalGeometry geo(model, p, 3);
  auto pj = phi_contractions(geo, model);
  return PhiScalars{values(pj.phi_form), pj.Phi.value(), pj.norm_sq.value(), pj.Phi, pj.norm_sq};
}

ConcurrencyReport check_concurrent(const FinslerModel& model, const std::vector<ChartPoint>& sample,
                                   double tol) {
  const int n = model.dim;
  if (static_cast<int>(model.phi.size()) != n) throw DomainError("model has no vector field");
  ConcurrencyReport r;
  bool have_c = false;
  for (const auto& p : sample) {
    if (!admissible(model, p)) continue;
    LocalGeometry geo(model, p, kDefaultOrder);
    auto phi = phi_jets(model, geo.chart());
    auto d = hcov_vector(geo, phi);
    if (!have_c) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += d.horizontal[i][i];
      r.c = s / n;
      r.worst_point = p;
      have_c = true;
    }
    double h = 0;
    double v = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        h = std::max(h, std::abs(d.horizontal[i][j] - (i == j ? r.c : 0.0)));
        v = std::max(v, std::abs(d.vertical[i][j]));
      }
    if (h > r.h_residual) {
      r.h_residual = h;
      r.worst_point = p;
    }
    r.v_residual = std::max(r.v_residual, v);
    const auto& g = geo.g();
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += phi[i].value() * 0.5 * g[i][j].gradient(n + k);
        r.cartan_contraction = std::max(r.cartan_contraction, std::abs(s));
      }
    ++r.points_checked;
  }
  if (r.points_checked == 0) throw NoAdmissiblePoints("no admissible point in the concurrency sample");
  r.pass = r.h_residual <= tol && std::abs(std::abs(r.c) - 1.0) <= tol && r.v_residual == 0.0;
  return r;
}

namespace {

struct Residual {
  double worst = 0;
  void add(double diff, double scale) { worst = std::max(worst, std::abs(diff) / std::max(1.0, scale)); }
};

}  // namespace

std::map<std::string, double> field_identities(const FinslerModel& model, const ChartPoint& p, double c) {
  require_admissible(model, p);
  const int n = model.dim;
  LocalGeometry geo(model, p, kDefaultOrder);
  auto pj = phi_contractions(geo, model);
  const auto& G = geo.spray();
  const auto& B = geo.berwald();
  const Jet& F = geo.F();
  const double Fv = F.value();
  const double Phi = pj.Phi.value();

  std::vector<Jet> ell;
  for (int i = 0; i < n; ++i) ell.push_back(geo.dy(F, i));

  Residual v_phi, h_phi, s_phi, h_F, h_ell, v_ell, v_quot, v_norm;
  for (int j = 0; j < n; ++j) {
    double lhs = pj.Phi.gradient(n + j);
    v_phi.add(lhs - pj.phi_form[j].value(), std::max(std::abs(lhs), std::abs(pj.phi_form[j].value())));
    double dPhi = geo.delta(pj.Phi, j).value();
    double rhs = c * Fv * ell[j].value();
    h_phi.add(dPhi - rhs, std::max(std::abs(dPhi), std::abs(rhs)));
    h_F.add(geo.delta(F, j).value(), Fv);
    v_norm.add(pj.norm_sq.gradient(n + j), pj.norm_sq.value());
  }

  double spray_deriv = 0;
  for (int k = 0; k < n; ++k)
    spray_deriv += p.y[k] * pj.Phi.gradient(k) - 2.0 * G[k].value() * pj.Phi.gradient(n + k);
  s_phi.add(spray_deriv - c * Fv * Fv, std::max(std::abs(spray_deriv), Fv * Fv));

  for (int i = 0; i < n; ++i) {
    double s = 0;
    double scale = 0;
    for (int j = 0; j < n; ++j) {
      double term = geo.delta(ell[i], j).value();
      for (int k = 0; k < n; ++k) term -= ell[k].value() * B[k][i][j].value();
      s += p.y[j] * term;
      scale = std::max(scale, std::abs(p.y[j] * geo.delta(ell[i], j).value()));
    }
    h_ell.add(s, scale);
    for (int j = 0; j < n; ++j) {
      double hbar = geo.g()[i][j].value() - ell[i].value() * ell[j].value();
      double lhs = ell[i].gradient(n + j);
      v_ell.add(lhs - hbar / Fv, std::max(std::abs(lhs), std::abs(hbar / Fv)));
    }
  }

  Jet fj = F * F / pj.Phi;
  const double fF = 2.0 * Fv / Phi;
  const double fPhi = -Fv * Fv / (Phi * Phi);
  for (int j = 0; j < n; ++j) {
    double lhs = fj.gradient(n + j);
    double rhs = fF * ell[j].value() + fPhi * pj.phi_form[j].value();
    v_quot.add(lhs - rhs, std::max(std::abs(lhs), std::abs(rhs)));
  }

  return {{"dy Phi = phi_form", v_phi.worst},
          {"delta Phi = c F ell", h_phi.worst},
          {"S(Phi) = c F^2", s_phi.worst},
          {"delta F = 0", h_F.worst},
          {"y^j ell_i|j = 0", h_ell.worst},
          {"dy ell = hbar/F", v_ell.worst},
          {"dy (F^2/Phi)", v_quot.worst},
          {"dy |phi|^2 = 0", v_norm.worst}};
}

FinslerModel with_phi_sign(const FinslerModel& model, double sign) {
  if (sign > 0) return model;
  FinslerModel out = model;
  for (auto& component : out.phi) {
    auto neg = std::make_shared<expr::Node>();
    neg->op = expr::Op::Neg;
    neg->dimension = model.dim;
    neg->lhs = component;
    component = neg;
  }
  return out;
}

}  // namespace finsler
