#pragma once

// Fundamental objects of a Finsler metric in induced coordinates (x, y) on TM.
//
// Conventions (all derived from jets of F^2):
//   g_ij   = 1/2 d^2 F^2 / dy^i dy^j           metric tensor
//   l_i    = dF / dy^i                          supporting form
//   hbar   = g - l (x) l                        angular metric
//   C_ijk  = 1/4 d^3 F^2 / dy^i dy^j dy^k       Cartan tensor
//   G^i    = 1/4 g^il (y^k d^2F^2/dx^k dy^l - dF^2/dx^l)
//            for the spray S = y^i d/dx^i - 2 G^i d/dy^i
//   N^i_j  = dG^i / dy^j,   G^i_jk = dN^i_j / dy^k
//   R^i_jk = delta_j N^i_k - delta_k N^i_j,  delta_j = d/dx^j - N^l_j d/dy^l
//
// Chart variables are ordered x1..xn, y1..yn inside every jet.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/jet.hpp"

namespace finsler {

using Vector = std::vector<double>;
using Matrix = std::vector<Vector>;
using Tensor3 = std::vector<Matrix>;

struct ChartPoint {
  Vector x;
  Vector y;
  int dim() const { return static_cast<int>(x.size()); }
};

/// Jets of every chart coordinate expanded at `p`.
std::vector<Jet> seed_chart(const ChartPoint& p, int order);

/// Source of the metric function F as a jet at a chart point.
class MetricFunction {
 public:
  virtual ~MetricFunction() = default;
  virtual Jet evaluate(const ChartPoint& p, int order) const = 0;
  virtual std::string describe() const = 0;
};

/// F given by an expression over x1..xn, y1..yn.
class ExpressionMetric final : public MetricFunction {
 public:
  explicit ExpressionMetric(expr::Ast f) : f_(std::move(f)) {}
  Jet evaluate(const ChartPoint& p, int order) const override;
  std::string describe() const override { return expr::to_string(f_); }
  const expr::Ast& ast() const { return f_; }

 private:
  expr::Ast f_;
};

/// Strict-positivity constraint on the chart.
struct DomainGuard {
  std::string label;
  std::function<double(const ChartPoint&)> value;
};

DomainGuard make_guard(const expr::Guard& g);

struct FinslerModel {
  int dim = 0;
  std::string name;
  std::shared_ptr<const MetricFunction> metric;
  /// Vector field phi^i(x); empty when the model carries none.
  std::vector<expr::Ast> phi;
  std::vector<DomainGuard> guards;
  /// Kropina exponent.
  double m = 1.0;
};

/// Builds a model from expression text; validates that phi depends on x only.
FinslerModel make_model(int dim, std::string name, std::string_view metric,
                        const std::vector<std::string>& phi, const std::vector<std::string>& guards,
                        double m = 1.0);

double metric_value(const FinslerModel& model, const ChartPoint& p);

/// True when every guard exceeds `margin` at p and y != 0.
bool admissible(const FinslerModel& model, const ChartPoint& p, double margin = 0.0);
/// Throws GuardViolation naming the first failed guard.
void require_admissible(const FinslerModel& model, const ChartPoint& p);

/// phi^i evaluated over the given chart jets.
std::vector<Jet> phi_jets(const FinslerModel& model, const std::vector<Jet>& chart);

/// Jet-level geometry at one chart point. Built from jets of F of order K:
/// g is valid to order K-2, the spray to K-2, N to K-3, Berwald and the
/// curvature to K-4.
class LocalGeometry {
 public:
  LocalGeometry(const FinslerModel& model, const ChartPoint& p, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  const ChartPoint& point() const { return point_; }

  const std::vector<Jet>& chart() const { return chart_; }
  const Jet& x(int i) const { return chart_[i]; }
  const Jet& y(int i) const { return chart_[dim_ + i]; }
  const Jet& F() const { return F_; }
  const Jet& F2() const { return F2_; }
  const JetMatrix& g() const { return g_; }

  const JetMatrix& g_inv() const;
  const std::vector<Jet>& spray() const;
  const JetMatrix& nonlinear() const;   // N[i][j] = N^i_j
  const std::vector<JetMatrix>& berwald() const;  // B[i][j][k] = G^i_jk
  /// delta_j f = df/dx^j - N^l_j df/dy^l, one order below min(f, N).
  Jet delta(const Jet& f, int j) const;
  Jet dx(const Jet& f, int j) const { return f.derivative(j); }
  Jet dy(const Jet& f, int j) const { return f.derivative(dim_ + j); }

 private:
  int dim_;
  int order_;
  ChartPoint point_;
  std::vector<Jet> chart_;
  Jet F_;
  Jet F2_;
  JetMatrix g_;
  mutable JetMatrix g_inv_;
  mutable std::vector<Jet> spray_;
  mutable JetMatrix nonlinear_;
  mutable std::vector<JetMatrix> berwald_;
};

/// Evaluated objects at a chart point.
struct TensorBundle {
  double F = 0;
  double E = 0;
  Matrix g;
  Matrix g_inv;
  Vector ell;
  Matrix hbar;
  Tensor3 cartan;
  Vector spray;
  Matrix nonlinear;
  Tensor3 berwald;
  Tensor3 curvature;
};

struct FundamentalForms {
  double F = 0;
  double E = 0;
  Matrix g;
  Matrix g_inv;
  Vector ell;
  Matrix hbar;
  Tensor3 cartan;
};

struct SprayConnection {
  Vector spray;
  Matrix nonlinear;
  Tensor3 berwald;
};

struct CovariantDerivative {
  Matrix horizontal;  // [i][j] = V^i_{|j}
  Matrix vertical;    // [i][j] = dV^i/dy^j
};

/// Default jet order of the pipeline.
inline constexpr int kDefaultOrder = 4;

/// g_ij without inverting it (works on degenerate points).
Matrix metric_tensor(const FinslerModel& model, const ChartPoint& p);
FundamentalForms fundamental_forms(const FinslerModel& model, const ChartPoint& p);
SprayConnection spray_and_connection(const FinslerModel& model, const ChartPoint& p);
Tensor3 curvature(const FinslerModel& model, const ChartPoint& p);
TensorBundle tensor_bundle(const FinslerModel& model, const ChartPoint& p,
                           int order = kDefaultOrder);

FundamentalForms fundamental_forms(const LocalGeometry& geo);
Tensor3 curvature(const LocalGeometry& geo);

/// Berwald covariant derivatives of a pi-vector field given as n expressions.
CovariantDerivative hcov_vector(const FinslerModel& model, const ChartPoint& p,
                                const std::vector<expr::Ast>& field);
/// Same, for a field already expanded as jets over the geometry's chart.
CovariantDerivative hcov_vector(const LocalGeometry& geo, const std::vector<Jet>& field);

Matrix values(const JetMatrix& m);
Vector values(const std::vector<Jet>& v);

}  // namespace finsler
