#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A Jet stores the Taylor coefficients of a function of n_vars variables
// about a fixed expansion point, for every multi-index of total degree
// <= order. Coefficient(mi) = (d^|mi| f / dv^mi) / mi!. Arithmetic is closed
// under truncation: no operation ever reads or writes a coefficient above the
// jet's order.
//
// Coefficients are stored densely in graded order (all degree-0 entries, then
// degree 1, ...), so the layout of order k is a prefix of the layout of order
// k+1 in the same number of variables. Truncation is therefore a resize.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace finsler {

using MultiIndex = std::vector<int>;

/// Shared, immutable indexing tables for one (n_vars, order) pair.
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
  };
  struct DerivativeTerm {
    std::uint32_t src;
    std::uint32_t dst;
    double factor;
  };

  /// Cached layout; thread-safe.
  static std::shared_ptr<const JetLayout> get(int n_vars, int order);

  int n_vars() const noexcept { return n_vars_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return degree_.size(); }

  int degree(std::size_t rank) const { return degree_[rank]; }
  std::span<const std::uint8_t> exponents(std::size_t rank) const;
  /// Product of factorials of the exponents of `rank`.
  double factorial(std::size_t rank) const { return factorial_[rank]; }

  /// Rank of a multi-index; throws IndexOutOfRange / OrderExceeded.
  std::size_t rank(std::span<const int> mi) const;
  /// Number of coefficients of total degree <= d.
  std::size_t prefix_size(int d) const { return degree_offset_[d + 1]; }

  /// All (lhs, rhs) pairs whose product lands in `out`, grouped by output.
  std::span<const Product> products_into(std::size_t out) const;
  std::span<const DerivativeTerm> derivative_terms(int var) const { return derivative_[var]; }

 private:
  JetLayout(int n_vars, int order);

  int n_vars_;
  int order_;
  std::vector<std::uint8_t> exponents_;  // size() * n_vars_
  std::vector<int> degree_;
  std::vector<double> factorial_;
  std::vector<std::size_t> degree_offset_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_offset_;
  std::vector<std::vector<DerivativeTerm>> derivative_;
  std::vector<std::uint64_t> keys_;  // sorted packed exponents
  std::vector<std::uint32_t> key_rank_;
};

class Jet {
 public:
  /// Constant jet.
  Jet(std::shared_ptr<const JetLayout> layout, double value = 0.0);

  static Jet constant(double value, int n_vars, int order);
  /// Jet of the coordinate function v_index expanded at `value`.
  static Jet variable(int index, double value, int n_vars, int order);

  const std::shared_ptr<const JetLayout>& layout() const noexcept { return layout_; }
  int n_vars() const noexcept { return layout_->n_vars(); }
  int order() const noexcept { return layout_->order(); }

  double value() const noexcept { return coeffs_[0]; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<double> coefficients() noexcept { return coeffs_; }
  double coefficient(std::span<const int> mi) const { return coeffs_[layout_->rank(mi)]; }

  /// Mixed partial derivative d^|mi| f / dv^mi at the expansion point.
  double partial(std::span<const int> mi) const;
  double partial(std::initializer_list<int> mi) const {
    return partial(std::span<const int>(mi.begin(), mi.size()));
  }
  /// First partial with respect to variable `var`.
  double gradient(int var) const;

  /// Derivative jet d/dv_var, one order lower.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator/(Jet a, double b) { return a /= b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(double a, const Jet& b) { return -b + a; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(double a, const Jet& b);

 private:
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> coeffs);
  friend Jet sqrt(const Jet& a);
  friend Jet pow(const Jet& a, double exponent);

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> coeffs_;
};

Jet sqrt(const Jet& a);
/// a^p by univariate Taylor composition. Negative bases are accepted for
/// integral p; a zero base only for non-negative integral p.
Jet pow(const Jet& a, double exponent);

/// Constant with the same layout as `like`.
inline Jet constant_like(const Jet& like, double value) { return Jet(like.layout(), value); }
inline double constant_like(double, double value) { return value; }

using JetMatrix = std::vector<std::vector<Jet>>;

/// Solves A x = b over the jet ring by Gaussian elimination with partial
/// pivoting on constant terms. Result order is the minimum order involved.
std::vector<Jet> jet_linear_solve(JetMatrix a, std::vector<Jet> b);
/// Same elimination applied to several right-hand sides; returns solutions
/// in the order of `columns`.
std::vector<std::vector<Jet>> jet_linear_solve_columns(JetMatrix a,
                                                       std::vector<std::vector<Jet>> columns);

}  // namespace finsler
