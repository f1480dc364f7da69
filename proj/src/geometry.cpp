#include "finsler/geometry.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

std::vector<Jet> seed_chart(const ChartPoint& p, int order) {
  const int n = p.dim();
  if (static_cast<int>(p.y.size()) != n) throw IndexOutOfRange("chart point x and y sizes differ");
  std::vector<Jet> out;
  out.reserve(2 * n);
  for (int i = 0; i < n; ++i) out.push_back(Jet::variable(i, p.x[i], 2 * n, order));
  for (int i = 0; i < n; ++i) out.push_back(Jet::variable(n + i, p.y[i], 2 * n, order));
  return out;
}

Jet ExpressionMetric::evaluate(const ChartPoint& p, int order) const {
  return expr::eval(f_, seed_chart(p, order));
}

DomainGuard make_guard(const expr::Guard& g) {
  auto ast = g.expr;
  return DomainGuard{g.text, [ast](const ChartPoint& p) {
                       std::vector<double> env = p.x;
                       env.insert(env.end(), p.y.begin(), p.y.end());
                       return expr::eval(ast, env);
                     }};
}

FinslerModel make_model(int dim, std::string name, std::string_view metric,
                        const std::vector<std::string>& phi, const std::vector<std::string>& guards,
                        double m) {
  FinslerModel model;
  model.dim = dim;
  model.name = std::move(name);
  model.metric = std::make_shared<ExpressionMetric>(expr::parse(metric, dim));
  model.m = m;
  if (!phi.empty() && static_cast<int>(phi.size()) != dim)
    throw IndexOutOfRange("vector field needs " + std::to_string(dim) + " components, got " +
                          std::to_string(phi.size()));
  for (const auto& text : phi) {
    auto ast = expr::parse(text, dim);
    if (expr::depends_on_direction(ast))
      throw DomainError("vector field component '" + text + "' depends on y");
    model.phi.push_back(ast);
  }
  for (const auto& text : guards) model.guards.push_back(make_guard(expr::parse_guard(text, dim)));
  return model;
}

double metric_value(const FinslerModel& model, const ChartPoint& p) {
  return model.metric->evaluate(p, 0).value();
}

namespace {

bool guard_holds(const DomainGuard& g, const ChartPoint& p, double margin) {
  try {
    return g.value(p) > margin;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

bool admissible(const FinslerModel& model, const ChartPoint& p, double margin) {
  bool nonzero = false;
  for (double v : p.y) nonzero = nonzero || v != 0.0;
  if (!nonzero) return false;
  for (const auto& g : model.guards)
    if (!guard_holds(g, p, margin)) return false;
  return true;
}

void require_admissible(const FinslerModel& model, const ChartPoint& p) {
  bool nonzero = false;
  for (double v : p.y) nonzero = nonzero || v != 0.0;
  if (!nonzero) throw GuardViolation("direction y is zero");
  for (const auto& g : model.guards)
    if (!guard_holds(g, p, 0.0)) throw GuardViolation("domain guard '" + g.label + " > 0' violated");
}

std::vector<Jet> phi_jets(const FinslerModel& model, const std::vector<Jet>& chart) {
  std::vector<Jet> out;
  for (const auto& c : model.phi) out.push_back(expr::eval(c, chart));
  return out;
}

// ---------------------------------------------------------------------------

LocalGeometry::LocalGeometry(const FinslerModel& model, const ChartPoint& p, int order)
    : dim_(model.dim),
      order_(order),
      point_(p),
      chart_(seed_chart(p, order)),
      F_(model.metric->evaluate(p, order)),
      F2_(F_ * F_) {
  if (p.dim() != dim_) throw IndexOutOfRange("chart point dimension does not match model");
  if (order < 2) throw OrderExceeded("geometry needs jets of order >= 2");
  g_.assign(dim_, {});
  for (int i = 0; i < dim_; ++i) {
    Jet di = dy(F2_, i);
    for (int j = 0; j < dim_; ++j) g_[i].push_back(dy(di, j) * 0.5);
  }
}

const JetMatrix& LocalGeometry::g_inv() const {
  if (g_inv_.empty()) {
    std::vector<std::vector<Jet>> columns;
    for (int j = 0; j < dim_; ++j) {
      std::vector<Jet> e;
      for (int i = 0; i < dim_; ++i) e.push_back(constant_like(g_[0][0], i == j ? 1.0 : 0.0));
      columns.push_back(std::move(e));
    }
    try {
      columns = jet_linear_solve_columns(g_, std::move(columns));
    } catch (const SingularConstantMatrix& e) {
      throw SingularMetric(std::string("metric tensor is singular: ") + e.what());
    }
    g_inv_.assign(dim_, std::vector<Jet>(dim_, constant_like(g_[0][0], 0.0)));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) g_inv_[i][j] = columns[j][i];
  }
  return g_inv_;
}

const std::vector<Jet>& LocalGeometry::spray() const {
  if (spray_.empty()) {
    const auto& inv = g_inv();
    std::vector<Jet> w;
    for (int l = 0; l < dim_; ++l) {
      Jet dyl = dy(F2_, l);
      Jet acc = -dx(F2_, l);
      for (int k = 0; k < dim_; ++k) acc += y(k) * dx(dyl, k);
      w.push_back(acc);
    }
    for (int i = 0; i < dim_; ++i) {
      Jet s = constant_like(inv[0][0], 0.0);
      for (int l = 0; l < dim_; ++l) s += inv[i][l] * w[l];
      spray_.push_back(s * 0.25);
    }
  }
  return spray_;
}

const JetMatrix& LocalGeometry::nonlinear() const {
  if (nonlinear_.empty()) {
    if (order_ < 3) throw OrderExceeded("nonlinear connection needs jets of order >= 3");
    const auto& G = spray();
    nonlinear_.assign(dim_, {});
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) nonlinear_[i].push_back(dy(G[i], j));
  }
  return nonlinear_;
}

const std::vector<JetMatrix>& LocalGeometry::berwald() const {
  if (berwald_.empty()) {
    if (order_ < 4) throw OrderExceeded("Berwald coefficients need jets of order >= 4");
    const auto& N = nonlinear();
    berwald_.assign(dim_, JetMatrix(dim_));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) berwald_[i][j].push_back(dy(N[i][j], k));
  }
  return berwald_;
}

Jet LocalGeometry::delta(const Jet& f, int j) const {
  const auto& N = nonlinear();
  Jet out = dx(f, j);
  for (int l = 0; l < dim_; ++l) out -= N[l][j] * dy(f, l);
  return out;
}

// ---------------------------------------------------------------------------

Matrix values(const JetMatrix& m) {
  Matrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& e : m[i]) out[i].push_back(e.value());
  return out;
}

Vector values(const std::vector<Jet>& v) {
  Vector out;
  for (const auto& e : v) out.push_back(e.value());
  return out;
}

namespace {

FundamentalForms forms_from(const LocalGeometry& geo) {
  const int n = geo.dim();
  FundamentalForms f;
  f.F = geo.F().value();
  f.E = 0.5 * f.F * f.F;
  f.g = values(geo.g());
  f.g_inv = values(geo.g_inv());
  for (int i = 0; i < n; ++i) f.ell.push_back(geo.F().gradient(n + i));
  f.hbar = f.g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.hbar[i][j] -= f.ell[i] * f.ell[j];
  f.cartan.assign(n, Matrix(n, Vector(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) f.cartan[i][j][k] = 0.5 * geo.g()[i][j].gradient(n + k);
  return f;
}

SprayConnection connection_from(const LocalGeometry& geo) {
  SprayConnection s;
  s.spray = values(geo.spray());
  s.nonlinear = values(geo.nonlinear());
  for (const auto& layer : geo.berwald()) s.berwald.push_back(values(layer));
  return s;
}

Tensor3 curvature_from(const LocalGeometry& geo) {
  const int n = geo.dim();
  const auto& N = geo.nonlinear();
  Tensor3 R(n, Matrix(n, Vector(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        R[i][j][k] = geo.delta(N[i][k], j).value() - geo.delta(N[i][j], k).value();
  return R;
}

}  // namespace

FundamentalForms fundamental_forms(const LocalGeometry& geo) { return forms_from(geo); }
Tensor3 curvature(const LocalGeometry& geo) { return curvature_from(geo); }

Matrix metric_tensor(const FinslerModel& model, const ChartPoint& p) {
  require_admissible(model, p);
  return values(LocalGeometry(model, p, 2).g());
}

FundamentalForms fundamental_forms(const FinslerModel& model, const ChartPoint& p) {
  require_admissible(model, p);
  return forms_from(LocalGeometry(model, p, 3));
}

SprayConnection spray_and_connection(const FinslerModel& model, const ChartPoint& p) {
  require_admissible(model, p);
  return connection_from(LocalGeometry(model, p, kDefaultOrder));
}

Tensor3 curvature(const FinslerModel& model, const ChartPoint& p) {
  require_admissible(model, p);
  return curvature_from(LocalGeometry(model, p, kDefaultOrder));
}

TensorBundle tensor_bundle(const FinslerModel& model, const ChartPoint& p, int order) {
  require_admissible(model, p);
  if (order < 4) throw OrderExceeded("tensor bundle needs jets of order >= 4");
  LocalGeometry geo(model, p, order);
  auto f = forms_from(geo);
  auto s = connection_from(geo);
  TensorBundle b;
  b.F = f.F;
  b.E = f.E;
  b.g = std::move(f.g);
  b.g_inv = std::move(f.g_inv);
  b.ell = std::move(f.ell);
  b.hbar = std::move(f.hbar);
  b.cartan = std::move(f.cartan);
  b.spray = std::move(s.spray);
  b.nonlinear = std::move(s.nonlinear);
  b.berwald = std::move(s.berwald);
  b.curvature = curvature_from(geo);
  return b;
}

CovariantDerivative hcov_vector(const LocalGeometry& geo, const std::vector<Jet>& field) {
  const int n = geo.dim();
  const auto& B = geo.berwald();
  CovariantDerivative d;
  d.horizontal.assign(n, Vector(n));
  d.vertical.assign(n, Vector(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double h = geo.delta(field[i], j).value();
      for (int k = 0; k < n; ++k) h += field[k].value() * B[i][k][j].value();
      d.horizontal[i][j] = h;
      d.vertical[i][j] = field[i].gradient(n + j);
    }
  }
  return d;
}

CovariantDerivative hcov_vector(const FinslerModel& model, const ChartPoint& p,
                                const std::vector<expr::Ast>& field) {
  require_admissible(model, p);
  if (static_cast<int>(field.size()) != model.dim)
    throw IndexOutOfRange("pi-vector field needs one component per dimension");
  LocalGeometry geo(model, p, kDefaultOrder);
  std::vector<Jet> jets;
  for (const auto& c : field) jets.push_back(expr::eval(c, geo.chart()));
  return hcov_vector(geo, jets);
}

}  // namespace finsler
