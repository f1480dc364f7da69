#include "finsler/fn_calculus.hpp"

#include "finsler/errors.hpp"

namespace finsler::fn {

namespace {

void require_square(const Form& K, std::size_t size) {
  if (K.size() != size) throw IndexOutOfRange("vector 1-form size does not match field");
  for (const auto& row : K)
    if (row.size() != size) throw IndexOutOfRange("vector 1-form is not square");
}

}  // namespace

Field act(const Form& K, const Field& W) {
  require_square(K, W.size());
  Field out;
  out.reserve(W.size());
  for (const auto& row : K) {
    Jet s = row[0] * W[0];
    for (std::size_t b = 1; b < W.size(); ++b) s += row[b] * W[b];
    out.push_back(std::move(s));
  }
  return out;
}

Form compose(const Form& K, const Form& L) {
  require_square(L, K.size());
  const std::size_t n = K.size();
  Form out(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Jet s = K[a][0] * L[0][b];
      for (std::size_t c = 1; c < n; ++c) s += K[a][c] * L[c][b];
      out[a].push_back(std::move(s));
    }
  return out;
}

Field scaled(const Field& W, double s) {
  Field out = W;
  for (auto& c : out) c *= s;
  return out;
}

Field sum(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw IndexOutOfRange("field sizes differ");
  Field out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
  return out;
}

Form sum(const Form& a, const Form& b) {
  require_square(b, a.size());
  Form out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] += b[i][j];
  return out;
}

Form scaled(const Form& a, double s) {
  Form out = a;
  for (auto& row : out)
    for (auto& e : row) e *= s;
  return out;
}

Field lie_bracket(const Field& W, const Field& Z) {
  if (W.size() != Z.size()) throw IndexOutOfRange("field sizes differ");
  const int size = static_cast<int>(W.size());
  if (size != W[0].n_vars()) throw IndexOutOfRange("field size must equal the number of chart variables");
  Field out;
  for (int a = 0; a < size; ++a) {
    Jet s = W[0] * Z[a].derivative(0) - Z[0] * W[a].derivative(0);
    for (int b = 1; b < size; ++b) s += W[b] * Z[a].derivative(b) - Z[b] * W[a].derivative(b);
    out.push_back(std::move(s));
  }
  return out;
}

Field fn_bracket(const Form& K, const Form& L, const Field& W, const Field& Z) {
  Field KW = act(K, W), KZ = act(K, Z), LW = act(L, W), LZ = act(L, Z);
  Field WZ = lie_bracket(W, Z);
  Field out = sum(lie_bracket(KW, LZ), lie_bracket(LW, KZ));
  out = sum(out, act(K, act(L, WZ)));
  out = sum(out, act(L, act(K, WZ)));
  out = sum(out, scaled(act(K, lie_bracket(LW, Z)), -1.0));
  out = sum(out, scaled(act(K, lie_bracket(W, LZ)), -1.0));
  out = sum(out, scaled(act(L, lie_bracket(KW, Z)), -1.0));
  out = sum(out, scaled(act(L, lie_bracket(W, KZ)), -1.0));
  return out;
}

Field nijenhuis(const Form& L, const Field& W, const Field& Z) {
  Field LW = act(L, W), LZ = act(L, Z);
  Field out = lie_bracket(LW, LZ);
  out = sum(out, act(L, act(L, lie_bracket(W, Z))));
  out = sum(out, scaled(act(L, lie_bracket(LW, Z)), -1.0));
  out = sum(out, scaled(act(L, lie_bracket(W, LZ)), -1.0));
  return out;
}

Field frame_field(int index, int size, const Jet& like) {
  if (index < 0 || index >= size) throw IndexOutOfRange("frame index out of range");
  Field out;
  for (int a = 0; a < size; ++a) out.push_back(constant_like(like, a == index ? 1.0 : 0.0));
  return out;
}

Form identity_form(int size, const Jet& like) {
  Form out(size);
  for (int a = 0; a < size; ++a)
    for (int b = 0; b < size; ++b) out[a].push_back(constant_like(like, a == b ? 1.0 : 0.0));
  return out;
}

Form zero_form(int size, const Jet& like) { return scaled(identity_form(size, like), 0.0); }

CanonicalForms canonical_forms(const LocalGeometry& geo) {
  const int n = geo.dim();
  const int size = 2 * n;
  const auto& N = geo.nonlinear();
  const auto& G = geo.spray();
  const Jet& like = N[0][0];
  CanonicalForms f{zero_form(size, like), zero_form(size, like), zero_form(size, like),
                   zero_form(size, like), {}, {}};
  for (int i = 0; i < n; ++i) {
    f.J[n + i][i] = constant_like(like, 1.0);
    f.h[i][i] = constant_like(like, 1.0);
    f.v[n + i][n + i] = constant_like(like, 1.0);
    for (int j = 0; j < n; ++j) {
      f.h[n + i][j] = -N[i][j];
      f.v[n + i][j] = N[i][j];
    }
  }
  f.Gamma = sum(scaled(f.h, 2.0), scaled(identity_form(size, like), -1.0));
  for (int i = 0; i < n; ++i) f.liouville.push_back(constant_like(geo.y(i), 0.0));
  for (int i = 0; i < n; ++i) f.liouville.push_back(geo.y(i));
  for (int i = 0; i < n; ++i) f.spray.push_back(geo.y(i));
  for (int i = 0; i < n; ++i) f.spray.push_back(G[i] * -2.0);
  return f;
}

CanonicalForms canonical_forms(const FinslerModel& model, const ChartPoint& p) {
  require_admissible(model, p);
  return canonical_forms(LocalGeometry(model, p, kDefaultOrder));
}

Tensor3 fn_curvature(const LocalGeometry& geo) {
  const int n = geo.dim();
  auto forms = canonical_forms(geo);
  const Jet& like = forms.h[0][0];
  Tensor3 R(n, Matrix(n, Vector(n)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Field b = fn_bracket(forms.h, forms.h, frame_field(j, 2 * n, like), frame_field(k, 2 * n, like));
      for (int i = 0; i < n; ++i) R[i][j][k] = -0.5 * b[n + i].value();
    }
  return R;
}

}  // namespace finsler::fn
