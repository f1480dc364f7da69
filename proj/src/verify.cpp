#include "finsler/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

Vector flatten(const Matrix& m) {
  Vector out;
  for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
  return out;
}

Vector flatten(const Tensor3& t) {
  Vector out;
  for (const auto& m : t) {
    auto f = flatten(m);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

double max_abs(const Vector& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Accumulates LEFT/RIGHT comparisons into a CheckResult; every comparison
/// is scaled by max(1, |LEFT|, |RIGHT|) over the whole tensor.
class Collector {
 public:
  explicit Collector(CheckResult& r) : r_(r) {}

  void compare(const std::string& what, const ChartPoint& p, const Vector& lhs, const Vector& rhs) {
    double err = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) err = std::max(err, std::abs(lhs[i] - rhs[i]));
    record(what, p, err, std::max({1.0, max_abs(lhs), max_abs(rhs)}));
  }
  void compare(const std::string& what, const ChartPoint& p, double lhs, double rhs) {
    compare(what, p, Vector{lhs}, Vector{rhs});
  }
  /// `residual` should vanish; `scale` is the size of the terms it came from.
  void zero(const std::string& what, const ChartPoint& p, const Vector& residual, double scale) {
    record(what, p, max_abs(residual), std::max(1.0, scale));
  }
  void record(const std::string& what, const ChartPoint& p, double abs_err, double scale) {
    const double rel = abs_err / scale;
    r_.max_abs_err = std::max(r_.max_abs_err, abs_err);
    if (!r_.worst_point || rel > r_.max_rel_err) {
      r_.max_rel_err = std::max(r_.max_rel_err, rel);
      r_.worst_point = p;
    }
    auto& slot = per_[what];
    slot = std::max(slot, rel);
  }
  void finish(double tol, double abs_tol) {
    r_.tolerance = tol;
    r_.pass = r_.points_evaluated > 0 && (r_.max_rel_err <= tol || r_.max_abs_err <= abs_tol);
    r_.status = r_.pass ? "pass" : "fail";
    if (per_.size() > 1 || (per_.size() == 1 && per_.begin()->first != r_.name)) {
      Json j = Json::object();
      for (const auto& [k, v] : per_) j[k] = v;
      r_.notes["max_rel_err_by_identity"] = j;
    }
  }

 private:
  CheckResult& r_;
  std::map<std::string, double> per_;
};

Vector values_of(const fn::Form& K) {
  Vector out;
  for (const auto& row : K)
    for (const auto& e : row) out.push_back(e.value());
  return out;
}

/// Random quadratic polynomial in the chart variables.
struct Polynomial {
  double c0 = 0;
  Vector linear;
  Matrix quadratic;  // upper triangle used

  static Polynomial random(std::mt19937_64& rng, int vars) {
    Polynomial p;
    p.c0 = uniform(rng, -1, 1);
    for (int i = 0; i < vars; ++i) p.linear.push_back(uniform(rng, -1, 1));
    p.quadratic.assign(vars, Vector(vars, 0.0));
    for (int i = 0; i < vars; ++i)
      for (int j = i; j < vars; ++j) p.quadratic[i][j] = uniform(rng, -1, 1);
    return p;
  }

  Jet eval(const std::vector<Jet>& chart) const {
    Jet s = constant_like(chart[0], c0);
    const int vars = static_cast<int>(linear.size());
    for (int i = 0; i < vars; ++i) {
      Jet inner = constant_like(chart[0], linear[i]);
      for (int j = i; j < vars; ++j) inner += quadratic[i][j] * chart[j];
      s += inner * chart[i];
    }
    return s;
  }
};

std::vector<Jet> eval_all(const std::vector<Polynomial>& ps, const std::vector<Jet>& chart) {
  std::vector<Jet> out;
  for (const auto& p : ps) out.push_back(p.eval(chart));
  return out;
}

std::vector<Polynomial> random_polynomials(std::mt19937_64& rng, int count, int vars) {
  std::vector<Polynomial> out;
  for (int i = 0; i < count; ++i) out.push_back(Polynomial::random(rng, vars));
  return out;
}

fn::Form random_form(std::mt19937_64& rng, const std::vector<Jet>& chart) {
  const int size = static_cast<int>(chart.size());
  fn::Form K(size);
  for (int a = 0; a < size; ++a)
    for (int b = 0; b < size; ++b) K[a].push_back(Polynomial::random(rng, size).eval(chart));
  return K;
}

Matrix inverse(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw SingularMetric("finite-difference metric is singular");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

Json vector_json(const Vector& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(x);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ChartPoint> sample(const FinslerModel& model, const SampleSpec& spec) {
  const int n = model.dim;
  if (static_cast<int>(spec.box.size()) != 2 * n)
    throw ConfigError("sample box needs " + std::to_string(2 * n) + " intervals");
  if (spec.count < 1) throw ConfigError("sample count must be positive");
  for (const auto& [lo, hi] : spec.box)
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw ConfigError("sample box interval is invalid");
  std::mt19937_64 rng(spec.seed);
  std::vector<ChartPoint> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < spec.count && attempts < spec.max_attempts) {
    ++attempts;
    ChartPoint p{Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) p.x[i] = uniform(rng, spec.box[i].first, spec.box[i].second);
    for (int i = 0; i < n; ++i) p.y[i] = uniform(rng, spec.box[n + i].first, spec.box[n + i].second);
    if (admissible(model, p, spec.guard_margin)) out.push_back(std::move(p));
  }
  if (static_cast<int>(out.size()) < spec.count)
    throw AcceptanceTooLow("accepted " + std::to_string(out.size()) + " of " + std::to_string(spec.count) +
                           " points in " + std::to_string(attempts) + " attempts");
  return out;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "concurrency",   "fundamental",        "lemma",            "fd-crosscheck",  "curvature-base",
      "fn-selftest",   "kropina-ell",        "kropina-hbar",     "kropina-metric", "kropina-cartan",
      "kropina-spray", "kropina-nonlinear",  "barthel",          "curvature",      "berwald-vertical",
      "berwald-horizontal", "projective",    "not-concurrent",   "ar-factorization", "nondegeneracy"};
  return names;
}

bool is_kropina_check(const std::string& name) {
  static const std::vector<std::string> names = {
      "kropina-ell", "kropina-hbar",     "kropina-metric",     "kropina-cartan", "kropina-spray",
      "kropina-nonlinear", "barthel",    "curvature",          "berwald-vertical", "berwald-horizontal",
      "projective",  "not-concurrent",   "ar-factorization",   "nondegeneracy"};
  return std::find(names.begin(), names.end(), name) != names.end();
}

// ---------------------------------------------------------------------------

SuiteState::SuiteState(FinslerModel model, SuiteOptions options)
    : model_(std::move(model)), options_(std::move(options)) {}

const std::vector<ChartPoint>& SuiteState::points() {
  if (!points_) points_ = sample(model_, options_.sample);
  return *points_;
}

const CheckResult& SuiteState::concurrency() {
  if (concurrency_) return *concurrency_;
  CheckResult r;
  r.name = "concurrency";
  r.tolerance = options_.tolerances.concurrency;
  if (static_cast<int>(model_.phi.size()) != model_.dim) {
    r.status = "precondition-failed";
    r.notes["reason"] = "model has no vector field";
    concurrency_ = r;
    return *concurrency_;
  }
  try {
    auto rep = check_concurrent(model_, points(), options_.tolerances.concurrency);
    c_ = rep.c;
    r.points_evaluated = rep.points_checked;
    r.max_abs_err = std::max(rep.h_residual, std::abs(std::abs(rep.c) - 1.0));
    r.max_rel_err = r.max_abs_err;
    r.worst_point = rep.worst_point;
    r.pass = rep.pass && rep.cartan_contraction <= options_.tolerances.abs;
    r.status = r.pass ? "pass" : "fail";
    r.notes["c"] = rep.c;
    r.notes["h_residual"] = rep.h_residual;
    r.notes["v_residual"] = rep.v_residual;
    r.notes["cartan_contraction"] = rep.cartan_contraction;
    r.notes["phi_negated"] = options_.phi_sign_normalization && rep.c > 0;
  } catch (const Error& e) {
    r.status = "error";
    r.notes["error"] = e.what();
  }
  concurrency_ = r;
  return *concurrency_;
}

bool SuiteState::concurrent() { return concurrency().pass; }

const FinslerModel& SuiteState::kropina_model() {
  if (!kmodel_) {
    concurrency();
    kmodel_ = with_phi_sign(model_, options_.phi_sign_normalization && c_ > 0 ? -1.0 : 1.0);
  }
  return *kmodel_;
}

const FinslerModel& SuiteState::hatted_model() {
  if (!hat_) hat_ = fhat_model(kropina_model());
  return *hat_;
}

const std::vector<ChartPoint>& SuiteState::kropina_points() {
  if (!kpoints_) {
    FinslerModel sampling = hatted_model();
    FinslerModel base = kropina_model();
    const double margin = options_.tolerances.kropina_margin;
    sampling.guards.push_back(DomainGuard{"|D|/scale - margin", [base, margin](const ChartPoint& p) {
                                            auto c = raw_context(base, p);
                                            return std::abs(c.D) / c.D_scale - margin;
                                          }});
    SampleSpec spec = options_.sample;
    spec.seed = options_.sample.seed + 1;
    kpoints_ = sample(sampling, spec);
    kcache_.assign(kpoints_->size(), std::nullopt);
  }
  return *kpoints_;
}

SuiteState::KropinaPoint& SuiteState::kropina_point(std::size_t i) {
  const auto& pts = kropina_points();
  if (!kcache_[i]) {
    const ChartPoint& p = pts[i];
    LocalGeometry base(kropina_model(), p, kDefaultOrder + 1);
    auto kj = kropina_jets(base, kropina_model());
    auto ctx = context(kj, options_.sigma);
    auto pred = predicted(base, kj, ctx);
    kcache_[i] = KropinaPoint{p, std::move(base), std::move(kj), ctx, std::move(pred), std::nullopt};
  }
  return *kcache_[i];
}

const LocalGeometry& SuiteState::hatted(std::size_t i) {
  auto& kp = kropina_point(i);
  if (!kp.hatted) kp.hatted.emplace(hatted_model(), kp.p, kDefaultOrder);
  return *kp.hatted;
}

// ---------------------------------------------------------------------------

namespace {

void check_fundamental(SuiteState& s, CheckResult& r) {
  const auto& model = s.model();
  const int n = model.dim;
  Collector col(r);
  for (const auto& p : s.points()) {
    LocalGeometry geo(model, p, kDefaultOrder);
    auto f = fundamental_forms(geo);
    const Vector G = values(geo.spray());
    const Matrix N = values(geo.nonlinear());
    const auto& B = geo.berwald();
    const auto R = curvature(geo);
    const Vector& y = p.y;

    Matrix gt = f.g;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gt[i][j] = f.g[j][i];
    col.compare("g-symmetric", p, flatten(f.g), flatten(gt));
    double gyy = 0, ly = 0;
    Vector hy(n, 0.0), Cy(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
      ly += f.ell[i] * y[i];
      for (int j = 0; j < n; ++j) {
        gyy += f.g[i][j] * y[i] * y[j];
        hy[i] += f.hbar[i][j] * y[j];
        for (int k = 0; k < n; ++k) Cy[i * n + j] += f.cartan[i][j][k] * y[k];
      }
    }
    col.compare("g(y,y)=F^2", p, gyy, f.F * f.F);
    col.compare("ell(y)=F", p, ly, f.F);
    col.zero("hbar(y)=0", p, hy, max_abs(flatten(f.hbar)) * max_abs(y));
    col.zero("C(y)=0", p, Cy, max_abs(flatten(f.cartan)) * max_abs(y));
    double csym = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          csym = std::max({csym, std::abs(f.cartan[i][j][k] - f.cartan[j][i][k]),
                           std::abs(f.cartan[i][j][k] - f.cartan[i][k][j])});
    col.zero("C-symmetric", p, {csym}, max_abs(flatten(f.cartan)));

    for (double lambda : {0.5, 2.0, 3.0}) {
      ChartPoint q{p.x, y};
      for (auto& v : q.y) v *= lambda;
      if (!admissible(model, q)) continue;
      col.compare("g-homogeneity", p, flatten(metric_tensor(model, q)), flatten(f.g));
    }
    {
      ChartPoint q{p.x, y};
      for (auto& v : q.y) v *= 2.0;
      if (admissible(model, q)) {
        auto s2 = spray_and_connection(model, q).spray;
        Vector four(G);
        for (auto& v : four) v *= 4.0;
        col.compare("spray-homogeneity", p, s2, four);
      }
    }
    Vector Ny(n, 0.0), twoG(n);
    for (int i = 0; i < n; ++i) {
      twoG[i] = 2.0 * G[i];
      for (int j = 0; j < n; ++j) Ny[i] += N[i][j] * y[j];
    }
    col.compare("N(y)=2G", p, Ny, twoG);
    double bsym = 0, bscale = 0, rsym = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          bsym = std::max(bsym, std::abs(B[i][j][k].value() - B[i][k][j].value()));
          bscale = std::max(bscale, std::abs(B[i][j][k].value()));
          rsym = std::max(rsym, std::abs(R[i][j][k] + R[i][k][j]));
        }
    col.zero("berwald-symmetric", p, {bsym}, bscale);
    col.zero("curvature-antisymmetric", p, {rsym}, max_abs(flatten(R)));
    std::vector<Jet> yfield(geo.chart().begin() + n, geo.chart().end());
    auto hy_cov = hcov_vector(geo, yfield);
    col.zero("y-parallel", p, flatten(hy_cov.horizontal), max_abs(flatten(N)));

    Vector dl, hl;
    double dF = 0;
    for (int i = 0; i < n; ++i) {
      Jet li = geo.dy(geo.F(), i);
      for (int j = 0; j < n; ++j) {
        dl.push_back(li.gradient(n + j));
        hl.push_back(f.hbar[i][j] / f.F);
      }
      dF = std::max(dF, std::abs(geo.delta(geo.F(), i).value()));
    }
    col.compare("d_y ell = hbar/F", p, dl, hl);
    col.zero("delta F = 0", p, {dF}, f.F);
    ++r.points_evaluated;
  }
  col.finish(s.options().tolerances.identity, 0.0);
}

void check_lemma(SuiteState& s, CheckResult& r) {
  const double c = s.c() > 0 ? 1.0 : -1.0;
  r.notes["c_used"] = c;
  Collector col(r);
  for (const auto& p : s.points()) {
    for (const auto& [name, res] : field_identities(s.model(), p, c)) col.record(name, p, res, 1.0);
    ++r.points_evaluated;
  }
  col.finish(s.options().tolerances.algebraic, 0.0);
}

void check_fd(SuiteState& s, CheckResult& r) {
  const auto& model = s.model();
  const int n = model.dim;
  const double h = 1e-5;
  Collector col(r);
  const auto& pts = s.points();
  const int count = std::min<int>(s.options().fd_points, static_cast<int>(pts.size()));
  for (int idx = 0; idx < count; ++idx) {
    const ChartPoint& p = pts[idx];
    // First derivatives of F^2 come from order-1 jets; every second
    // derivative below is a central difference of them.
    auto grad = [&](int var, double step) {
      ChartPoint q{p.x, p.y};
      (var < n ? q.x[var] : q.y[var - n]) += step;
      Jet F = model.metric->evaluate(q, 1);
      Jet F2 = F * F;
      Vector out(2 * n);
      for (int a = 0; a < 2 * n; ++a) out[a] = F2.gradient(a);
      return out;
    };
    std::vector<Vector> plus(2 * n), minus(2 * n);
    for (int a = 0; a < 2 * n; ++a) {
      plus[a] = grad(a, h);
      minus[a] = grad(a, -h);
    }
    auto d2 = [&](int a, int b) { return (plus[b][a] - minus[b][a]) / (2 * h); };  // d_b d_a F^2
    Matrix g(n, Vector(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[i][j] = 0.25 * (d2(n + i, n + j) + d2(n + j, n + i));
    const Vector base = grad(0, 0.0);
    Vector w(n, 0.0);
    for (int l = 0; l < n; ++l) {
      w[l] = -base[l];
      for (int k = 0; k < n; ++k) w[l] += p.y[k] * d2(n + l, k);
    }
    Matrix ginv = inverse(g);
    Vector G(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) G[i] += 0.25 * ginv[i][l] * w[l];

    LocalGeometry geo(model, p, kDefaultOrder);
    col.compare("g", p, flatten(values(geo.g())), flatten(g));
    col.compare("spray", p, values(geo.spray()), G);
    Matrix N(n, Vector(n));
    for (int j = 0; j < n; ++j) {
      ChartPoint a{p.x, p.y}, b{p.x, p.y};
      a.y[j] += h;
      b.y[j] -= h;
      auto Ga = values(LocalGeometry(model, a, 2).spray());
      auto Gb = values(LocalGeometry(model, b, 2).spray());
      for (int i = 0; i < n; ++i) N[i][j] = (Ga[i] - Gb[i]) / (2 * h);
    }
    col.compare("nonlinear", p, flatten(values(geo.nonlinear())), flatten(N));
    ++r.points_evaluated;
  }
  r.notes["step"] = h;
  col.finish(s.options().tolerances.fd, 0.0);
}

void check_curvature_base(SuiteState& s, CheckResult& r) {
  Collector col(r);
  for (const auto& p : s.points()) {
    LocalGeometry geo(s.model(), p, kDefaultOrder);
    col.compare("curvature-base", p, flatten(curvature(geo)), flatten(fn::fn_curvature(geo)));
    ++r.points_evaluated;
  }
  col.finish(s.options().tolerances.algebraic, 0.0);
}

template <class Fn>
void over_kropina_points(SuiteState& s, CheckResult& r, std::size_t limit, Fn&& fn) {
  const auto& pts = s.kropina_points();
  const std::size_t count = std::min(limit, pts.size());
  for (std::size_t i = 0; i < count; ++i) {
    fn(i, s.kropina_point(i));
    ++r.points_evaluated;
  }
}

void check_kropina(const std::string& name, SuiteState& s, CheckResult& r) {
  const int n = s.model().dim;
  const auto& tol = s.options().tolerances;
  Collector col(r);
  double tolerance = tol.rel;
  auto all = std::numeric_limits<std::size_t>::max();

  if (name == "kropina-metric" || name == "ar-factorization") {
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      const auto& hat = s.hatted(i);
      Matrix direct = values(hat.g());
      if (name == "kropina-metric") {
        col.compare("g_hat", kp.p, flatten(direct), flatten(kp.predicted.g_hat));
        double gyy = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) gyy += kp.predicted.g_hat[a][b] * kp.p.y[a] * kp.p.y[b];
        const double Fh = hat.F().value();
        col.compare("g_hat(y,y)=F_hat^2", kp.p, gyy, Fh * Fh);
      } else {
        Matrix za = kp.predicted.a_hat;
        for (auto& row : za)
          for (auto& v : row) v *= kp.predicted.zeta_hat;
        col.compare("zeta_hat*a_hat", kp.p, flatten(direct), flatten(za));
      }
    });
    if (name == "ar-factorization") tolerance = tol.algebraic;
  } else if (name == "kropina-ell") {
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      const auto& hat = s.hatted(i);
      Vector direct;
      double ly = 0;
      for (int a = 0; a < n; ++a) {
        direct.push_back(hat.F().gradient(n + a));
        ly += kp.predicted.ell_hat[a] * kp.p.y[a];
      }
      col.compare("ell_hat", kp.p, direct, kp.predicted.ell_hat);
      col.compare("ell_hat(y)=F_hat", kp.p, ly, hat.F().value());
    });
  } else if (name == "kropina-hbar") {
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      const auto& hat = s.hatted(i);
      Matrix direct = values(hat.g());
      Matrix assembled = kp.predicted.hbar_hat;
      for (int a = 0; a < n; ++a) {
        const double la = hat.F().gradient(n + a);
        for (int b = 0; b < n; ++b) {
          direct[a][b] -= la * hat.F().gradient(n + b);
          assembled[a][b] += kp.predicted.ell_hat[a] * kp.predicted.ell_hat[b];
        }
      }
      col.compare("hbar_hat", kp.p, flatten(direct), flatten(kp.predicted.hbar_hat));
      col.compare("g_hat = hbar_hat + ell_hat ell_hat", kp.p, flatten(assembled), flatten(kp.predicted.g_hat));
    });
  } else if (name == "kropina-cartan") {
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      auto f = fundamental_forms(s.hatted(i));
      col.compare("cartan_hat", kp.p, flatten(f.cartan), flatten(kp.predicted.cartan_hat));
    });
  } else if (name == "kropina-spray") {
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      col.compare("spray_hat", kp.p, values(s.hatted(i).spray()), kp.predicted.spray_hat);
    });
  } else if (name == "kropina-nonlinear") {
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      col.compare("nonlinear_hat", kp.p, flatten(values(s.hatted(i).nonlinear())),
                  flatten(kp.predicted.nonlinear_hat));
    });
  } else if (name == "barthel") {
    r.notes["sigma"] = s.options().sigma;
    r.notes["vertical_arguments"] = "zero by construction";
    over_kropina_points(s, r, all, [&](std::size_t i, auto& kp) {
      Matrix Nh = values(s.hatted(i).nonlinear());
      Matrix N = values(kp.base.nonlinear());
      Matrix diff(n, Vector(n));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) diff[a][b] = -2.0 * (Nh[a][b] - N[a][b]);
      col.compare("Gamma_hat - Gamma", kp.p, flatten(diff), flatten(kp.predicted.FF));
    });
  } else if (name == "curvature") {
    r.notes["sigma"] = s.options().sigma;
    over_kropina_points(s, r, s.options().curvature_points, [&](std::size_t i, auto& kp) {
      Tensor3 direct = curvature(s.hatted(i));
      Tensor3 R = curvature(kp.base);
      auto forms = fn::canonical_forms(kp.base);
      auto FF = barthel_change_form(kp.base, kp.jets, s.options().sigma);
      const Jet& like = FF[n][0];
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          auto W = fn::frame_field(j, 2 * n, like);
          auto Z = fn::frame_field(k, 2 * n, like);
          auto hf = fn::fn_bracket(forms.h, FF, W, Z);
          auto nf = fn::nijenhuis(FF, W, Z);
          for (int a = 0; a < n; ++a) R[a][j][k] += -0.5 * hf[n + a].value() - 0.25 * nf[n + a].value();
        }
      col.compare("curvature_hat", kp.p, flatten(direct), flatten(R));
    });
  } else if (name == "berwald-horizontal" || name == "berwald-vertical") {
    std::mt19937_64 rng(s.options().sample.seed + 2);
    std::vector<std::vector<Polynomial>> fields;
    for (int f = 0; f < s.options().berwald_fields; ++f) fields.push_back(random_polynomials(rng, n, 2 * n));
    r.notes["fields"] = s.options().berwald_fields;
    over_kropina_points(s, r, s.options().curvature_points, [&](std::size_t i, auto& kp) {
      const auto& hat = s.hatted(i);
      for (const auto& field : fields) {
        auto Yh = eval_all(field, hat.chart());
        auto Yb = eval_all(field, kp.base.chart());
        if (name == "berwald-horizontal") {
          col.compare("horizontal", kp.p, flatten(hcov_vector(hat, Yh).horizontal),
                      flatten(predicted_berwald_horizontal(kp.base, kp.jets, Yb)));
        } else {
          Matrix vh(n, Vector(n)), vb(n, Vector(n));
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              vh[a][b] = Yh[a].gradient(n + b);
              vb[a][b] = Yb[a].gradient(n + b);
            }
          col.compare("vertical", kp.p, flatten(vh), flatten(vb));
        }
      }
    });
    if (name == "berwald-vertical") {
      tolerance = 1e-12;
      r.notes["structural"] = "both vertical derivatives are plain d/dy";
    }
  } else {
    throw UnknownCheck("unknown check '" + name + "'");
  }
  col.finish(tolerance, name == "berwald-vertical" ? 0.0 : tol.abs);
}

void check_projective(SuiteState& s, CheckResult& r) {
  const int n = s.model().dim;
  const double threshold = 1e-6;
  double min_ratio = std::numeric_limits<double>::infinity();
  int skipped = 0;
  const auto& pts = s.kropina_points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto& kp = s.kropina_point(i);
    const Vector& y = kp.p.y;
    const Vector phi = values(kp.jets.phi);
    double yy = 0, pp = 0, py = 0;
    for (int a = 0; a < n; ++a) {
      yy += y[a] * y[a];
      pp += phi[a] * phi[a];
      py += phi[a] * y[a];
    }
    const double sin2 = 1.0 - py * py / (yy * pp);
    if (!(sin2 > 1e-6)) {
      ++skipped;
      continue;
    }
    Vector d = values(s.hatted(i).spray());
    Vector G = values(kp.base.spray());
    Matrix g = values(kp.base.g());
    for (int a = 0; a < n; ++a) d[a] -= G[a];
    double gdy = 0, gyy = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        gdy += g[a][b] * d[a] * y[b];
        gyy += g[a][b] * y[a] * y[b];
      }
    Vector perp(n);
    for (int a = 0; a < n; ++a) perp[a] = d[a] - gdy / gyy * y[a];
    double np = 0, nd = 0;
    for (int a = 0; a < n; ++a) {
      np += perp[a] * perp[a];
      nd += d[a] * d[a];
    }
    const double ratio = nd > 0 ? std::sqrt(np / nd) : 0.0;
    if (ratio < min_ratio) {
      min_ratio = ratio;
      r.worst_point = kp.p;
    }
    ++r.points_evaluated;
  }
  r.tolerance = threshold;
  r.max_abs_err = r.points_evaluated ? min_ratio : 0.0;
  r.max_rel_err = r.max_abs_err;
  r.notes["min_orthogonal_ratio"] = r.points_evaluated ? min_ratio : 0.0;
  r.notes["skipped_collinear"] = skipped;
  r.notes["criterion"] = "min_orthogonal_ratio >= tolerance";
  r.pass = r.points_evaluated > 0 && min_ratio >= threshold;
  r.status = r.pass ? "pass" : "fail";
}

void check_not_concurrent(SuiteState& s, CheckResult& r) {
  const auto& tol = s.options().tolerances;
  auto rep = check_concurrent(s.hatted_model(), s.kropina_points(), tol.concurrency);
  const double threshold = std::max(10.0 * tol.concurrency, 1e-3);
  // A field can also fail by becoming parallel (c = 0) with no residual.
  const double defect = std::max(rep.h_residual, std::abs(std::abs(rep.c) - 1.0));
  r.points_evaluated = rep.points_checked;
  r.max_abs_err = defect;
  r.max_rel_err = defect;
  r.worst_point = rep.worst_point;
  r.tolerance = threshold;
  r.notes["c"] = rep.c;
  r.notes["h_residual"] = rep.h_residual;
  r.notes["defect"] = defect;
  r.notes["concurrent_in_changed_metric"] = rep.pass;
  r.notes["criterion"] = "max(h_residual, ||c|-1|) > tolerance";
  r.pass = !rep.pass && defect > threshold;
  r.status = r.pass ? "pass" : "fail";
}

void check_nondegeneracy(SuiteState& s, CheckResult& r) {
  const auto& opt = s.options().nondegeneracy;
  if (!opt) throw ConfigError("nondegeneracy check needs a scan path");
  const auto& model = s.kropina_model();
  auto roots = degeneracy_roots(model, opt->path);
  std::vector<double> ts;
  for (int i = 0; i <= opt->path.steps; ++i)
    ts.push_back(opt->path.t0 + (opt->path.t1 - opt->path.t0) * i / opt->path.steps);
  ts.insert(ts.end(), roots.begin(), roots.end());
  std::sort(ts.begin(), ts.end());
  auto scan = nondegeneracy_scan(model, opt->path, ts);
  int violations = 0, near = 0, far = 0;
  double max_near_det = 0, min_far_det = std::numeric_limits<double>::infinity();
  for (const auto& smp : scan) {
    const double ad = std::abs(smp.D), det = std::abs(smp.det_g_hat);
    if (ad < opt->d_tol * smp.D_scale) {
      ++near;
      max_near_det = std::max(max_near_det, det);
      if (!(det < opt->det_tol)) {
        ++violations;
        r.worst_point = opt->path.at(smp.t);
      }
    } else if (ad > opt->d_far * smp.D_scale) {
      ++far;
      min_far_det = std::min(min_far_det, det);
      if (!(det > opt->det_floor)) {
        ++violations;
        r.worst_point = opt->path.at(smp.t);
      }
    }
  }
  r.points_evaluated = static_cast<int>(scan.size());
  r.max_abs_err = max_near_det;
  r.max_rel_err = max_near_det;
  r.tolerance = opt->det_tol;
  Json jr = Json::array();
  for (double t : roots) jr.push_back(t);
  r.notes["roots"] = jr;
  r.notes["degenerate_samples"] = near;
  r.notes["regular_samples"] = far;
  r.notes["max_abs_det_degenerate"] = max_near_det;
  r.notes["min_abs_det_regular"] = far ? min_far_det : 0.0;
  r.notes["violations"] = violations;
  r.pass = !scan.empty() && violations == 0 && (roots.empty() || near > 0);
  r.status = r.pass ? "pass" : "fail";
}

}  // namespace

CheckResult fn_selftest(const FinslerModel& model, const std::vector<ChartPoint>& points,
                        const FinslerModel* hatted, std::uint64_t seed, double tol) {
  CheckResult r;
  r.name = "fn-selftest";
  Collector col(r);
  std::mt19937_64 rng(seed);
  const int n = model.dim;
  const int size = 2 * n;
  auto spray_laws = [&](const LocalGeometry& geo, const std::string& tag, const ChartPoint& p) {
    auto cf = fn::canonical_forms(geo);
    col.compare("J S = C" + tag, p, values(fn::act(cf.J, cf.spray)), values(cf.liouville));
    col.compare("[C,S] = S" + tag, p, values(fn::lie_bracket(cf.liouville, cf.spray)), values(cf.spray));
  };
  for (const auto& p : points) {
    LocalGeometry geo(model, p, kDefaultOrder);
    const auto& chart = geo.chart();
    auto cf = fn::canonical_forms(geo);
    auto W = eval_all(random_polynomials(rng, size, size), chart);
    auto Z = eval_all(random_polynomials(rng, size, size), chart);
    auto K = random_form(rng, chart);
    auto L = random_form(rng, chart);
    const Jet& like = chart[0];

    auto NJ = values(fn::nijenhuis(cf.J, W, Z));
    col.zero("N_J = 0", p, NJ, std::max(max_abs(values(W)), max_abs(values(Z))));
    auto JW = fn::act(cf.J, W), JZ = fn::act(cf.J, Z);
    auto lhs = fn::lie_bracket(JW, JZ);
    auto rhs = fn::sum(fn::act(cf.J, fn::lie_bracket(W, JZ)), fn::act(cf.J, fn::lie_bracket(JW, Z)));
    col.compare("[JW,JZ] = J[W,JZ] + J[JW,Z]", p, values(lhs), values(rhs));
    col.compare("[K,L] = [L,K]", p, values(fn::fn_bracket(K, L, W, Z)), values(fn::fn_bracket(L, K, W, Z)));
    col.compare("bilinearity", p, values(fn::fn_bracket(fn::scaled(K, 2.5), L, W, Z)),
                values(fn::scaled(fn::fn_bracket(K, L, W, Z), 2.5)));
    auto I = fn::identity_form(size, like);
    col.zero("N_I = 0", p, values(fn::nijenhuis(I, W, Z)), max_abs(values(W)));
    col.zero("[W,W] = 0", p, values(fn::lie_bracket(W, W)), max_abs(values(W)));
    col.zero("[dx1,dy1] = 0", p, values(fn::lie_bracket(fn::frame_field(0, size, like), fn::frame_field(n, size, like))),
             1.0);
    col.zero("J^2 = 0", p, values_of(fn::compose(cf.J, cf.J)), 1.0);
    col.zero("J C = 0", p, values(fn::act(cf.J, cf.liouville)), max_abs(p.y));
    col.compare("h^2 = h", p, values_of(fn::compose(cf.h, cf.h)), values_of(cf.h));
    col.compare("v^2 = v", p, values_of(fn::compose(cf.v, cf.v)), values_of(cf.v));
    col.compare("h + v = I", p, values_of(fn::sum(cf.h, cf.v)), values_of(I));
    col.zero("h v = 0", p, values_of(fn::compose(cf.h, cf.v)), max_abs(values_of(cf.v)));
    col.compare("J Gamma = J", p, values_of(fn::compose(cf.J, cf.Gamma)), values_of(cf.J));
    col.compare("Gamma J = -J", p, values_of(fn::compose(cf.Gamma, cf.J)), values_of(fn::scaled(cf.J, -1.0)));
    spray_laws(geo, "", p);
    if (hatted && admissible(*hatted, p)) spray_laws(LocalGeometry(*hatted, p, kDefaultOrder), " (changed)", p);
    ++r.points_evaluated;
  }
  col.finish(tol, 0.0);
  return r;
}

CheckResult run_check(const std::string& name, SuiteState& s) {
  if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
    throw UnknownCheck("unknown check '" + name + "'");
  if (name == "concurrency") return s.concurrency();
  CheckResult r;
  r.name = name;
  if (is_kropina_check(name) && !s.concurrent()) {
    r.status = "precondition-failed";
    r.notes["reason"] = "vector field failed the concurrency check";
    return r;
  }
  try {
    if (name == "fundamental")
      check_fundamental(s, r);
    else if (name == "lemma")
      check_lemma(s, r);
    else if (name == "fd-crosscheck")
      check_fd(s, r);
    else if (name == "curvature-base")
      check_curvature_base(s, r);
    else if (name == "fn-selftest") {
      const auto& pts = s.points();
      std::vector<ChartPoint> sub(pts.begin(),
                                  pts.begin() + std::min<std::size_t>(s.options().selftest_points, pts.size()));
      const FinslerModel* hat = nullptr;
      if (s.model().phi.size() == static_cast<std::size_t>(s.model().dim) && s.concurrent()) hat = &s.hatted_model();
      r = fn_selftest(s.model(), sub, hat, s.options().sample.seed + 3, s.options().tolerances.identity);
    } else if (name == "projective")
      check_projective(s, r);
    else if (name == "not-concurrent")
      check_not_concurrent(s, r);
    else if (name == "nondegeneracy")
      check_nondegeneracy(s, r);
    else
      check_kropina(name, s, r);
  } catch (const Error& e) {
    r.pass = false;
    r.status = "error";
    r.notes["error"] = e.what();
  }
  return r;
}

VerificationReport run_suite(const FinslerModel& model, const SuiteOptions& options, Json model_echo) {
  VerificationReport rep;
  rep.model = std::move(model_echo);
  rep.tolerances = options.tolerances;
  rep.sigma = options.sigma;
  rep.seed = options.sample.seed;
  SuiteState state(model, options);
  std::vector<std::string> order;
  if (static_cast<int>(model.phi.size()) == model.dim) order.push_back("concurrency");
  for (const auto& name : options.checks)
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  for (const auto& name : order) rep.checks.push_back(run_check(name, state));
  rep.pass = !rep.checks.empty() &&
             std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
  return rep;
}

Json to_json(const ChartPoint& p) {
  Json j = Json::object();
  j["x"] = vector_json(p.x);
  j["y"] = vector_json(p.y);
  return j;
}

Json to_json(const CheckResult& r) {
  Json j = Json::object();
  j["name"] = r.name;
  j["status"] = r.status;
  j["pass"] = r.pass;
  j["points_evaluated"] = r.points_evaluated;
  j["max_abs_err"] = r.max_abs_err;
  j["max_rel_err"] = r.max_rel_err;
  j["tolerance"] = r.tolerance;
  j["worst_point"] = r.worst_point ? to_json(*r.worst_point) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const VerificationReport& r) {
  Json j = Json::object();
  j["model"] = r.model;
  Json t = Json::object();
  t["abs"] = r.tolerances.abs;
  t["rel"] = r.tolerances.rel;
  t["algebraic"] = r.tolerances.algebraic;
  t["identity"] = r.tolerances.identity;
  t["concurrency"] = r.tolerances.concurrency;
  t["fd"] = r.tolerances.fd;
  t["kropina_margin"] = r.tolerances.kropina_margin;
  j["tolerances"] = t;
  j["sigma"] = r.sigma;
  j["seed"] = r.seed;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  j["pass"] = r.pass;
  return j;
}

}  // namespace finsler
