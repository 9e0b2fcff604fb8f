#pragma once

#include "torusflow/field.hpp"
#include "torusflow/spectral.hpp"

namespace torusflow {

// Curvature of the right-invariant H1 metric at the identity (b = 2 unless
// stated otherwise). Every pairing <X, Y> below is int X . (1 - Laplacian) Y
// unless the L2 pairing is selected.

enum class Pairing { metric, l2 };

/// D1 Gamma(w, u) v = -Gamma(grad w . v, u) - Gamma(grad u . v, w) + grad Gamma(w, u) . v.
VectorField d1_gamma(const VectorField& w, const VectorField& u, const VectorField& v, double b = 2.0,
                     int pad = kDefaultPad);

/// R(u, v) w = D1 Gamma(w, u) v - D1 Gamma(w, v) u + Gamma(Gamma(w, v), u) - Gamma(Gamma(w, u), v).
VectorField curvature_tensor(const VectorField& u, const VectorField& v, const VectorField& w,
                             double b = 2.0, int pad = kDefaultPad);

/// <R(u, v) v, u>.
double sectional_direct(const VectorField& u, const VectorField& v, int pad = kDefaultPad);

/// <Gamma(u, v), Gamma(u, v)> - <Gamma(u, u), Gamma(v, v)>.
double gamma_terms(const VectorField& u, const VectorField& v, int pad = kDefaultPad);

/// The twelve-term remainder
///   <grad u.u, grad v.v> - <grad u.v, grad u.v> + <grad v.u, grad u.v> - <grad v.u, grad v.u>
/// + <grad(grad u.u).v, v> - <grad(grad u.v).v, u> + <grad(grad v.u).v, u> - <grad(grad v.u).u, v>
/// - <grad v.(grad u.u), v> - <grad u.(grad v.v), u> + <grad v.(grad v.u), u> + <grad u.(grad v.u), v>.
double r_term(const VectorField& u, const VectorField& v, Pairing pairing = Pairing::metric,
              int pad = kDefaultPad);

struct CurvatureReport {
  double s_formula = 0.0;
  double s_direct = 0.0;
  double gamma_terms = 0.0;
  double r_term = 0.0;
  /// |s_formula - s_direct|.
  double agreement = 0.0;
};

/// s_formula = gamma_terms + r_term, compared against sectional_direct.
CurvatureReport sectional_formula(const VectorField& u, const VectorField& v,
                                  Pairing pairing = Pairing::metric, int pad = kDefaultPad);

/// S(e_i, v) for v = sin(k1 x) sin(k2 y) (1, 1):
///   i = 1: (2 k1^2 + k2^2) / (8 (1 + k1^2 + k2^2)),  i = 2: (2 k2^2 + k1^2) / (8 (1 + k1^2 + k2^2)).
/// Throws std::invalid_argument unless i is 1 or 2 and k1, k2 are positive
/// integer multiples of 2 pi.
double closed_form_S(int i, double k1, double k2);

/// sin(2 pi j1 x) sin(2 pi j2 y) (1, 1) sampled on `grid`.
VectorField sine_product_field(const TorusGrid& grid, int j1, int j2);

}  // namespace torusflow
