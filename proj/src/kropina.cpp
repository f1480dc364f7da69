#include "finsler/kropina.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

void require_exponent(double m) {
  if (!std::isfinite(m) || m == 0.0 || m == -1.0)
    throw InvalidExponent("Kropina exponent must be finite and differ from 0 and -1");
}

Jet phi_from_gradient(const FinslerModel& model, const std::vector<Jet>& chart, const Jet& F) {
  const int n = model.dim;
  if (static_cast<int>(model.phi.size()) != n) throw DomainError("model has no vector field");
  Jet F2 = F * F;
  auto phi = phi_jets(model, chart);
  Jet Phi = phi[0] * F2.derivative(n);
  for (int i = 1; i < n; ++i) Phi += phi[i] * F2.derivative(n + i);
  return Phi * 0.5;
}

}  // namespace

HattedMetric::HattedMetric(FinslerModel base, double m) : base_(std::move(base)), m_(m) {
  require_exponent(m);
}

Jet HattedMetric::evaluate(const ChartPoint& p, int order) const {
  auto chart = seed_chart(p, order + 1);
  Jet F = base_.metric->evaluate(p, order + 1);
  Jet Phi = phi_from_gradient(base_, chart, F);
  return pow(F.truncated(order), m_ + 1.0) * pow(Phi, -m_);
}

std::string HattedMetric::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", m_);
  return "(" + base_.metric->describe() + ")^(" + buf + "+1) * Phi^(-" + buf + ")";
}

Jet kropina_phi(const FinslerModel& model, const ChartPoint& p, int order) {
  auto chart = seed_chart(p, order + 1);
  return phi_from_gradient(model, chart, model.metric->evaluate(p, order + 1));
}

FinslerModel fhat_model(const FinslerModel& model) {
  require_exponent(model.m);
  if (static_cast<int>(model.phi.size()) != model.dim) throw DomainError("model has no vector field");
  FinslerModel out = model;
  out.name = model.name + "^";
  out.metric = std::make_shared<HattedMetric>(model, model.m);
  FinslerModel base = model;
  out.guards.push_back(DomainGuard{"Phi", [base](const ChartPoint& p) {
                                     return kropina_phi(base, p, 0).value();
                                   }});
  return out;
}

KropinaJets kropina_jets(const LocalGeometry& geo, const FinslerModel& model) {
  require_exponent(model.m);
  const int n = geo.dim();
  const double m = model.m;
  auto pj = phi_contractions(geo, model);
  const Jet& F = geo.F();
  Jet F2 = geo.F2().truncated(pj.Phi.order());
  Jet Phi2 = pj.Phi * pj.Phi;
  Jet D = m * F2 * pj.norm_sq - (m - 1.0) * Phi2;
  Jet Psi1 = 2.0 * m * pj.Phi * F2 / D;
  Jet Psi2 = m * F2 * F2 / D;
  std::vector<Jet> ell;
  for (int i = 0; i < n; ++i) ell.push_back(geo.dy(F, i));
  return KropinaJets{m, F, std::move(pj.phi), std::move(pj.phi_form), std::move(ell), std::move(pj.Phi),
                     std::move(pj.norm_sq), std::move(D), std::move(Psi1), std::move(Psi2)};
}

namespace {

KropinaContext scalars(double m, double F, double Phi, double norm_sq, double sigma) {
  KropinaContext c;
  c.m = m;
  c.F = F;
  c.Phi = Phi;
  c.norm_sq = norm_sq;
  c.sigma = sigma;
  c.D = m * F * F * norm_sq - (m - 1.0) * Phi * Phi;
  c.D_scale = std::abs(m) * F * F * std::abs(norm_sq) + std::abs(m - 1.0) * Phi * Phi;
  return c;
}

void finish(KropinaContext& c) {
  if (!(std::abs(c.Phi) > 1e-14 * std::max(1.0, c.F * c.F))) throw ZeroPhi("Phi vanishes at the point");
  if (!(std::abs(c.D) > 1e-9 * c.D_scale))
    throw DegenerateChange("non-degeneracy scalar D = " + std::to_string(c.D) + " vanishes at the point");
  c.Psi1 = 2.0 * c.m * c.Phi * c.F * c.F / c.D;
  c.Psi2 = c.m * std::pow(c.F, 4) / c.D;
}

}  // namespace

KropinaContext raw_context(const FinslerModel& model, const ChartPoint& p) {
  require_exponent(model.m);
  LocalGeometry geo(model, p, 2);
  auto pj = phi_contractions(geo, model);
  auto c = scalars(model.m, geo.F().value(), pj.Phi.value(), pj.norm_sq.value(), 1.0);
  if (c.D != 0.0) {
    c.Psi1 = 2.0 * c.m * c.Phi * c.F * c.F / c.D;
    c.Psi2 = c.m * std::pow(c.F, 4) / c.D;
  }
  return c;
}

KropinaContext context(const KropinaJets& kj, double sigma) {
  auto c = scalars(kj.m, kj.F.value(), kj.Phi.value(), kj.norm_sq.value(), sigma);
  finish(c);
  return c;
}

KropinaContext context(const FinslerModel& model, const ChartPoint& p, double sigma) {
  require_exponent(model.m);
  require_admissible(model, p);
  LocalGeometry geo(model, p, 2);
  auto pj = phi_contractions(geo, model);
  auto c = scalars(model.m, geo.F().value(), pj.Phi.value(), pj.norm_sq.value(), sigma);
  finish(c);
  return c;
}

PredictedTensors predicted(const LocalGeometry& geo, const KropinaJets& kj, const KropinaContext& ctx) {
  const int n = geo.dim();
  const double m = kj.m;
  const double F = ctx.F;
  const double Phi = ctx.Phi;
  const double r = F / Phi;
  const double r2m = std::pow(r, 2.0 * m);
  const Vector ell = values(kj.ell);
  const Vector phi = values(kj.phi);
  const Vector pf = values(kj.phi_form);
  const Matrix g = values(geo.g());
  Matrix hbar = g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hbar[i][j] -= ell[i] * ell[j];
  Vector dPsi1(n), dPsi2(n);
  for (int j = 0; j < n; ++j) {
    dPsi1[j] = kj.Psi1.gradient(n + j);
    dPsi2[j] = kj.Psi2.gradient(n + j);
  }

  PredictedTensors t;
  for (int i = 0; i < n; ++i) t.ell_hat.push_back(std::pow(r, m) * ((m + 1) * ell[i] - m * r * pf[i]));
  t.hbar_hat.assign(n, Vector(n));
  t.g_hat.assign(n, Vector(n));
  t.a_hat.assign(n, Vector(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double pp = pf[i] * pf[j];
      const double pl = pf[i] * ell[j] + pf[j] * ell[i];
      const double ll = ell[i] * ell[j];
      t.hbar_hat[i][j] = (m + 1) * r2m * (hbar[i][j] + m * ll + m * r * (r * pp - pl));
      t.g_hat[i][j] = (m + 1) * r2m * g[i][j] + m * (2 * m + 1) * r2m * r * r * pp -
                      2 * m * (m + 1) * r2m * r * pl + 2 * m * (m + 1) * r2m * ll;
      t.a_hat[i][j] = g[i][j] / m + (2 * m + 1) / (m + 1) * r * r * pp + 2 * ll - 2 * r * pl;
    }
  t.zeta_hat = m * (m + 1) * r2m;

  // d/dy^k of F^p Phi^q
  auto dpow = [&](double p, double q, int k) {
    return p * std::pow(F, p - 1) * std::pow(Phi, q) * ell[k] + q * std::pow(F, p) * std::pow(Phi, q - 1) * pf[k];
  };
  t.cartan_hat.assign(n, Matrix(n, Vector(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double C = 0.5 * geo.g()[i][j].gradient(n + k);
        double s = 2 * (m + 1) * r2m * C;
        s += 2 * m * (m + 1) * std::pow(Phi, -2 * m) * std::pow(F, 2 * m - 1) *
             (hbar[i][k] * ell[j] + hbar[j][k] * ell[i]);
        s -= 2 * m * (m + 1) * std::pow(Phi, -2 * m - 1) * std::pow(F, 2 * m) *
             (hbar[i][k] * pf[j] + hbar[j][k] * pf[i]);
        s += (m + 1) * dpow(2 * m, -2 * m, k) * g[i][j];
        s += m * (2 * m + 1) * dpow(2 * m + 2, -2 * m - 2, k) * pf[i] * pf[j];
        s -= 2 * m * (m + 1) * dpow(2 * m + 1, -2 * m - 1, k) * (pf[i] * ell[j] + pf[j] * ell[i]);
        s += 2 * m * (m + 1) * dpow(2 * m, -2 * m, k) * ell[i] * ell[j];
        t.cartan_hat[i][j][k] = 0.5 * s;
      }

  const Vector G = values(geo.spray());
  const Matrix N = values(geo.nonlinear());
  const Vector& y = geo.point().y;
  t.nonlinear_hat.assign(n, Vector(n));
  t.FF.assign(n, Vector(n));
  for (int i = 0; i < n; ++i) {
    t.spray_hat.push_back(G[i] + 0.5 * ctx.Psi1 * y[i] - 0.5 * ctx.Psi2 * phi[i]);
    for (int j = 0; j < n; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      t.nonlinear_hat[i][j] = N[i][j] + 0.5 * (ctx.Psi1 * delta + dPsi1[j] * y[i] - dPsi2[j] * phi[i]);
      t.FF[i][j] = -ctx.Psi1 * delta - dPsi1[j] * y[i] + ctx.sigma * dPsi2[j] * phi[i];
    }
  }
  return t;
}

PredictedTensors predicted(const FinslerModel& model, const ChartPoint& p, const KropinaContext& ctx) {
  require_admissible(model, p);
  LocalGeometry geo(model, p, kDefaultOrder);
  return predicted(geo, kropina_jets(geo, model), ctx);
}

fn::Form barthel_change_form(const LocalGeometry& geo, const KropinaJets& kj, double sigma) {
  const int n = geo.dim();
  std::vector<Jet> dPsi1, dPsi2;
  for (int j = 0; j < n; ++j) {
    dPsi1.push_back(geo.dy(kj.Psi1, j));
    dPsi2.push_back(geo.dy(kj.Psi2, j));
  }
  fn::Form FF = fn::zero_form(2 * n, dPsi1[0]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet e = sigma * dPsi2[j] * kj.phi[i] - dPsi1[j] * geo.y(i);
      if (i == j) e -= kj.Psi1;
      FF[n + i][j] = e;
    }
  return FF;
}

Matrix predicted_berwald_horizontal(const LocalGeometry& geo, const KropinaJets& kj,
                                    const std::vector<Jet>& Y) {
  const int n = geo.dim();
  const auto d = hcov_vector(geo, Y);
  const Vector& y = geo.point().y;
  const Vector phi = values(kj.phi);
  const Vector Yv = values(Y);
  const double Psi1 = kj.Psi1.value();
  Vector dPsi1(n), dPsi2(n);
  Matrix ddPsi1(n, Vector(n)), ddPsi2(n, Vector(n));
  for (int k = 0; k < n; ++k) {
    Jet a = geo.dy(kj.Psi1, k);
    Jet b = geo.dy(kj.Psi2, k);
    dPsi1[k] = a.value();
    dPsi2[k] = b.value();
    for (int j = 0; j < n; ++j) {
      ddPsi1[k][j] = a.gradient(n + j);
      ddPsi2[k][j] = b.gradient(n + j);
    }
  }
  double Ydpsi1 = 0;
  for (int k = 0; k < n; ++k) Ydpsi1 += Yv[k] * dPsi1[k];

  Matrix out(n, Vector(n));
  for (int i = 0; i < n; ++i) {
    double yV = 0, phiV = 0;
    for (int l = 0; l < n; ++l) {
      yV += y[l] * d.vertical[i][l];
      phiV += phi[l] * d.vertical[i][l];
    }
    for (int j = 0; j < n; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      double inner = Psi1 * d.vertical[i][j] + dPsi1[j] * yV - dPsi1[j] * Yv[i] - Ydpsi1 * delta -
                     dPsi2[j] * phiV;
      double ddY1 = 0, ddY2 = 0;
      for (int k = 0; k < n; ++k) {
        ddY1 += Yv[k] * ddPsi1[k][j];
        ddY2 += Yv[k] * ddPsi2[k][j];
      }
      out[i][j] = d.horizontal[i][j] - 0.5 * inner + 0.5 * (ddY1 * y[i] - ddY2 * phi[i]);
    }
  }
  return out;
}

ChartPoint ScanPath::at(double t) const {
  ChartPoint p{x, Vector(u.size())};
  for (std::size_t i = 0; i < u.size(); ++i) p.y[i] = std::cos(t) * u[i] + std::sin(t) * v[i];
  return p;
}

double determinant(Matrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

namespace {

bool scan_scalars(const FinslerModel& model, const ChartPoint& p, KropinaContext& out) {
  if (!admissible(model, p)) return false;
  out = raw_context(model, p);
  return out.Phi != 0.0;
}

}  // namespace

std::vector<ScanSample> nondegeneracy_scan(const FinslerModel& model, const ScanPath& path,
                                           const std::vector<double>& ts) {
  auto hat = fhat_model(model);
  std::vector<ScanSample> out;
  for (double t : ts) {
    ChartPoint p = path.at(t);
    KropinaContext c;
    if (!scan_scalars(model, p, c) || !admissible(hat, p)) continue;
    out.push_back({t, c.D, c.D_scale, determinant(metric_tensor(hat, p))});
  }
  return out;
}

std::vector<ScanSample> nondegeneracy_scan(const FinslerModel& model, const ScanPath& path) {
  std::vector<double> ts;
  for (int i = 0; i <= path.steps; ++i) ts.push_back(path.t0 + (path.t1 - path.t0) * i / path.steps);
  return nondegeneracy_scan(model, path, ts);
}

std::vector<double> degeneracy_roots(const FinslerModel& model, const ScanPath& path) {
  auto D_at = [&](double t, double& D) {
    KropinaContext c;
    if (!scan_scalars(model, path.at(t), c)) return false;
    D = c.D;
    return true;
  };
  std::vector<double> roots;
  double prev_t = 0, prev_D = 0;
  bool have_prev = false;
  for (int i = 0; i <= path.steps; ++i) {
    double t = path.t0 + (path.t1 - path.t0) * i / path.steps;
    double D;
    if (!D_at(t, D)) {
      have_prev = false;
      continue;
    }
    if (D == 0.0) {
      roots.push_back(t);
    } else if (have_prev && prev_D != 0.0 && (prev_D < 0) != (D < 0)) {
      double a = prev_t, b = t, Da = prev_D;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        double mid = 0.5 * (a + b), Dm;
        if (!D_at(mid, Dm)) break;
        if (Dm == 0.0) {
          a = b = mid;
          break;
        }
        if ((Dm < 0) == (Da < 0)) {
          a = mid;
          Da = Dm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_D = D;
    have_prev = true;
  }
  return roots;
}

}  // namespace finsler
