#pragma once

// Vector fields and vector 1-forms on the chart of TM, frame (d/dx, d/dy).
//
// A field is 2n jets; a form is a 2n x 2n matrix of jets whose column b is the
// image of the b-th frame vector. Brackets differentiate the jets, so each
// bracket level costs one order.

#include <vector>

#include "finsler/geometry.hpp"

namespace finsler::fn {

using Field = std::vector<Jet>;
using Form = JetMatrix;

Field act(const Form& K, const Field& W);
Form compose(const Form& K, const Form& L);
Field scaled(const Field& W, double s);
Field sum(const Field& a, const Field& b);
Form sum(const Form& a, const Form& b);
Form scaled(const Form& a, double s);

/// [W,Z]^a = W^b d_b Z^a - Z^b d_b W^a.
Field lie_bracket(const Field& W, const Field& Z);

/// Frolicher-Nijenhuis bracket of two vector 1-forms evaluated on (W, Z):
/// [KW,LZ] + [LW,KZ] + KL[W,Z] + LK[W,Z] - K[LW,Z] - K[W,LZ] - L[KW,Z] - L[W,KZ].
Field fn_bracket(const Form& K, const Form& L, const Field& W, const Field& Z);

/// N_L(W,Z) = [LW,LZ] + L^2[W,Z] - L[LW,Z] - L[W,LZ].
Field nijenhuis(const Form& L, const Field& W, const Field& Z);

/// Constant frame vector number `index` with the layout of `like`.
Field frame_field(int index, int size, const Jet& like);
Form identity_form(int size, const Jet& like);
Form zero_form(int size, const Jet& like);

struct CanonicalForms {
  Form J;         // [[0,0],[I,0]]
  Form h;         // [[I,0],[-N,0]]
  Form v;         // [[0,0],[N,I]]
  Form Gamma;     // 2h - I
  Field liouville;  // (0, y)
  Field spray;      // (y, -2G)
};

/// Canonical structures of a geometry; h, v, Gamma carry N at order K-3 and
/// the spray G at order K-2.
CanonicalForms canonical_forms(const LocalGeometry& geo);
CanonicalForms canonical_forms(const FinslerModel& model, const ChartPoint& p);

/// Vertical part of -1/2 [h,h](d/dx^j, d/dx^k), as [i][j][k].
Tensor3 fn_curvature(const LocalGeometry& geo);

}  // namespace finsler::fn
