#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

constexpr double kSingularRelTol = 1e-12;

std::uint64_t pack(std::span<const std::uint8_t> e) {
  std::uint64_t key = 0;
  for (auto v : e) key = key * 64 + v;
  return key;
}

bool is_integer(double p) { return std::isfinite(p) && std::floor(p) == p; }

double max_abs(std::span<const double> c) {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

// Enumerates exponent vectors of total degree d in lexicographically
// decreasing order (v0 heaviest first).
void enumerate(int n, int d, std::vector<std::uint8_t>& current, int pos,
               std::vector<std::uint8_t>& out) {
  if (pos == n - 1) {
    current[pos] = static_cast<std::uint8_t>(d);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int k = d; k >= 0; --k) {
    current[pos] = static_cast<std::uint8_t>(k);
    enumerate(n, d - k, current, pos + 1, out);
  }
}

}  // namespace

JetLayout::JetLayout(int n_vars, int order) : n_vars_(n_vars), order_(order) {
  std::vector<std::uint8_t> current(n_vars, 0);
  degree_offset_.push_back(0);
  for (int d = 0; d <= order; ++d) {
    enumerate(n_vars, d, current, 0, exponents_);
    degree_offset_.push_back(exponents_.size() / n_vars);
  }
  const std::size_t count = exponents_.size() / n_vars;
  degree_.resize(count);
  factorial_.resize(count);
  for (int d = 0; d <= order; ++d)
    for (std::size_t r = degree_offset_[d]; r < degree_offset_[d + 1]; ++r) degree_[r] = d;

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(count);
  for (std::size_t r = 0; r < count; ++r) {
    auto e = exponents(r);
    double f = 1.0;
    for (auto v : e)
      for (int k = 2; k <= v; ++k) f *= k;
    factorial_[r] = f;
    keyed[r] = {pack(e), static_cast<std::uint32_t>(r)};
  }
  std::sort(keyed.begin(), keyed.end());
  for (auto& [k, r] : keyed) {
    keys_.push_back(k);
    key_rank_.push_back(r);
  }

  auto rank_of = [&](std::span<const std::uint8_t> e) {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), pack(e));
    return key_rank_[it - keys_.begin()];
  };

  // Products grouped by output rank.
  std::vector<std::vector<Product>> by_out(count);
  std::vector<std::uint8_t> sum(n_vars);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < degree_offset_[order - degree_[a] + 1]; ++b) {
      auto ea = exponents(a);
      auto eb = exponents(b);
      for (int v = 0; v < n_vars; ++v) sum[v] = ea[v] + eb[v];
      by_out[rank_of(sum)].push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
    }
  }
  product_offset_.push_back(0);
  for (auto& group : by_out) {
    products_.insert(products_.end(), group.begin(), group.end());
    product_offset_.push_back(products_.size());
  }

  derivative_.resize(n_vars);
  std::vector<std::uint8_t> lowered(n_vars);
  for (int v = 0; v < n_vars; ++v) {
    for (std::size_t r = 0; r < count; ++r) {
      auto e = exponents(r);
      if (e[v] == 0) continue;
      std::copy(e.begin(), e.end(), lowered.begin());
      --lowered[v];
      derivative_[v].push_back({static_cast<std::uint32_t>(r), rank_of(lowered), double(e[v])});
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int n_vars, int order) {
  if (n_vars < 1) throw IndexOutOfRange("jet needs at least one variable");
  if (n_vars > 10) throw IndexOutOfRange("jets support at most 10 variables");
  if (order < 0) throw OrderExceeded("negative jet order");
  if (order > 63) throw OrderExceeded("jet order too large");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n_vars, order}];
  if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(n_vars, order));
  return slot;
}

std::span<const std::uint8_t> JetLayout::exponents(std::size_t rank) const {
  return {exponents_.data() + rank * n_vars_, static_cast<std::size_t>(n_vars_)};
}

std::size_t JetLayout::rank(std::span<const int> mi) const {
  if (static_cast<int>(mi.size()) != n_vars_)
    throw IndexOutOfRange("multi-index has " + std::to_string(mi.size()) + " entries, expected " +
                          std::to_string(n_vars_));
  int total = 0;
  std::vector<std::uint8_t> e(n_vars_);
  for (int v = 0; v < n_vars_; ++v) {
    if (mi[v] < 0) throw IndexOutOfRange("negative exponent in multi-index");
    total += mi[v];
    if (total > order_) break;
    e[v] = static_cast<std::uint8_t>(mi[v]);
  }
  if (total > order_)
    throw OrderExceeded("multi-index degree exceeds jet order " + std::to_string(order_));
  auto it = std::lower_bound(keys_.begin(), keys_.end(), pack(e));
  return key_rank_[it - keys_.begin()];
}

std::span<const JetLayout::Product> JetLayout::products_into(std::size_t out) const {
  return {products_.data() + product_offset_[out], product_offset_[out + 1] - product_offset_[out]};
}

// ---------------------------------------------------------------------------

Jet::Jet(std::shared_ptr<const JetLayout> layout, double value)
    : layout_(std::move(layout)), coeffs_(layout_->size(), 0.0) {
  coeffs_[0] = value;
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> coeffs)
    : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {}

Jet Jet::constant(double value, int n_vars, int order) {
  return Jet(JetLayout::get(n_vars, order), value);
}

Jet Jet::variable(int index, double value, int n_vars, int order) {
  if (index < 0 || index >= n_vars)
    throw IndexOutOfRange("variable index " + std::to_string(index) + " out of range for " +
                          std::to_string(n_vars) + " variables");
  Jet j = constant(value, n_vars, order);
  if (order >= 1) j.coeffs_[1 + index] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> mi) const {
  auto r = layout_->rank(mi);
  return coeffs_[r] * layout_->factorial(r);
}

double Jet::gradient(int var) const {
  if (var < 0 || var >= n_vars()) throw IndexOutOfRange("gradient variable out of range");
  if (order() < 1) throw OrderExceeded("gradient of an order-0 jet");
  return coeffs_[1 + var];
}

Jet Jet::derivative(int var) const {
  if (var < 0 || var >= n_vars()) throw IndexOutOfRange("derivative variable out of range");
  if (order() < 1) throw OrderExceeded("derivative of an order-0 jet");
  Jet out(JetLayout::get(n_vars(), order() - 1));
  for (const auto& t : layout_->derivative_terms(var)) out.coeffs_[t.dst] += t.factor * coeffs_[t.src];
  return out;
}

Jet Jet::truncated(int order) const {
  if (order >= this->order()) return *this;
  auto layout = JetLayout::get(n_vars(), order);
  return Jet(layout, std::vector<double>(coeffs_.begin(), coeffs_.begin() + layout->size()));
}

namespace {

// Brings both operands to the lower of the two orders.
std::shared_ptr<const JetLayout> common_layout(const Jet& a, const Jet& b) {
  if (a.n_vars() != b.n_vars())
    throw IndexOutOfRange("jets over different variable counts (" + std::to_string(a.n_vars()) +
                          " vs " + std::to_string(b.n_vars()) + ")");
  return a.order() <= b.order() ? a.layout() : b.layout();
}

}  // namespace

Jet Jet::operator-() const {
  Jet out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

Jet& Jet::operator+=(const Jet& rhs) {
  auto layout = common_layout(*this, rhs);
  if (layout != layout_) *this = truncated(layout->order());
  for (std::size_t r = 0; r < coeffs_.size(); ++r) coeffs_[r] += rhs.coeffs_[r];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  auto layout = common_layout(*this, rhs);
  if (layout != layout_) *this = truncated(layout->order());
  for (std::size_t r = 0; r < coeffs_.size(); ++r) coeffs_[r] -= rhs.coeffs_[r];
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet& Jet::operator+=(double rhs) {
  coeffs_[0] += rhs;
  return *this;
}
Jet& Jet::operator-=(double rhs) {
  coeffs_[0] -= rhs;
  return *this;
}
Jet& Jet::operator*=(double rhs) {
  for (auto& c : coeffs_) c *= rhs;
  return *this;
}
Jet& Jet::operator/=(double rhs) {
  if (rhs == 0.0) throw DivisionBySingularJet("division of a jet by zero");
  for (auto& c : coeffs_) c /= rhs;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  auto layout = common_layout(a, b);
  std::vector<double> out(layout->size(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    double s = 0.0;
    for (const auto& p : layout->products_into(r)) s += a.coeffs_[p.lhs] * b.coeffs_[p.rhs];
    out[r] = s;
  }
  return Jet(layout, std::move(out));
}

// q * b = a solved coefficient by coefficient in graded order.
Jet operator/(const Jet& a, const Jet& b) {
  auto layout = common_layout(a, b);
  std::span<const double> bc(b.coeffs_.data(), layout->size());
  const double b0 = bc[0];
  if (std::abs(b0) <= kSingularRelTol * max_abs(bc) || b0 == 0.0)
    throw DivisionBySingularJet("division by a jet with vanishing constant term");
  std::vector<double> q(layout->size(), 0.0);
  q[0] = a.coeffs_[0] / b0;
  for (std::size_t r = 1; r < q.size(); ++r) {
    double s = a.coeffs_[r];
    for (const auto& p : layout->products_into(r))
      if (p.rhs != 0) s -= q[p.lhs] * bc[p.rhs];
    q[r] = s / b0;
  }
  return Jet(layout, std::move(q));
}

Jet operator/(double a, const Jet& b) { return constant_like(b, a) / b; }

Jet sqrt(const Jet& a) {
  const double a0 = a.coeffs_[0];
  if (!(a0 > kSingularRelTol * max_abs(a.coeffs_)))
    throw DomainError("sqrt of a jet with non-positive constant term " + std::to_string(a0));
  const auto& layout = a.layout_;
  std::vector<double> s(layout->size(), 0.0);
  s[0] = std::sqrt(a0);
  for (std::size_t r = 1; r < s.size(); ++r) {
    double acc = a.coeffs_[r];
    for (const auto& p : layout->products_into(r))
      if (p.lhs != 0 && p.rhs != 0) acc -= s[p.lhs] * s[p.rhs];
    s[r] = acc / (2.0 * s[0]);
  }
  return Jet(layout, std::move(s));
}

Jet pow(const Jet& a, double exponent) {
  const double a0 = a.value();
  const bool integral = is_integer(exponent);
  const bool near_zero = std::abs(a0) <= kSingularRelTol * max_abs(a.coefficients()) || a0 == 0.0;

  if (near_zero) {
    if (integral && exponent >= 0) {
      Jet result = constant_like(a, 1.0);
      Jet base = a;
      for (auto k = static_cast<long long>(exponent); k > 0; k >>= 1) {
        if (k & 1) result = result * base;
        if (k > 1) base = base * base;
      }
      return result;
    }
    if (integral) throw DivisionBySingularJet("negative power of a jet with vanishing constant term");
    throw DomainError("fractional power of a jet with vanishing constant term");
  }
  if (a0 < 0 && !integral)
    throw DomainError("fractional power of a jet with negative constant term " + std::to_string(a0));

  // f(a0 + t) = sum_k binom(p, k) a0^(p-k) t^k, composed with the nilpotent
  // part t = a - a0 by Horner's rule.
  const int order = a.order();
  std::vector<double> series(order + 1);
  double binom = 1.0;
  for (int k = 0; k <= order; ++k) {
    series[k] = binom * std::pow(a0, exponent - k);
    binom *= (exponent - k) / (k + 1);
  }
  Jet t = a;
  t.coefficients()[0] = 0.0;
  Jet result = constant_like(a, series[order]);
  for (int k = order - 1; k >= 0; --k) {
    result = result * t;
    result.coefficients()[0] += series[k];
  }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Jet>> jet_linear_solve_columns(JetMatrix a,
                                                       std::vector<std::vector<Jet>> columns) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw IndexOutOfRange("jet_linear_solve needs a square matrix");
  for (const auto& col : columns)
    if (col.size() != n) throw IndexOutOfRange("right-hand side size does not match matrix");
  if (n == 0) return columns;

  double scale = 0.0;
  for (const auto& row : a)
    for (const auto& e : row) scale = std::max(scale, std::abs(e.value()));

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a[r][k].value()) > std::abs(a[pivot][k].value())) pivot = r;
    if (!(std::abs(a[pivot][k].value()) > kSingularRelTol * scale))
      throw SingularConstantMatrix("constant-term matrix is singular at column " + std::to_string(k));
    if (pivot != k) {
      std::swap(a[pivot], a[k]);
      for (auto& col : columns) std::swap(col[pivot], col[k]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      Jet factor = a[r][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[r][c] -= factor * a[k][c];
      for (auto& col : columns) col[r] -= factor * col[k];
    }
  }
  for (auto& col : columns) {
    for (std::size_t k = n; k-- > 0;) {
      Jet s = col[k];
      for (std::size_t c = k + 1; c < n; ++c) s -= a[k][c] * col[c];
      col[k] = s / a[k][k];
    }
  }
  return columns;
}

std::vector<Jet> jet_linear_solve(JetMatrix a, std::vector<Jet> b) {
  return std::move(jet_linear_solve_columns(std::move(a), {std::move(b)}).front());
}

}  // namespace finsler
