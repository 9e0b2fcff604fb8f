#include "torusflow/curvature.hpp"

#include <cmath>
#include <stdexcept>

#include "torusflow/dynamics.hpp"

namespace torusflow {

VectorField d1_gamma(const VectorField& w, const VectorField& u, const VectorField& v, double b, int pad) {
  VectorField out = grad_dot(christoffel(w, u, b, pad), v, pad);
  out -= christoffel(grad_dot(w, v, pad), u, b, pad);
  out -= christoffel(grad_dot(u, v, pad), w, b, pad);
  return out;
}

VectorField curvature_tensor(const VectorField& u, const VectorField& v, const VectorField& w, double b,
                             int pad) {
  VectorField out = d1_gamma(w, u, v, b, pad) - d1_gamma(w, v, u, b, pad);
  out += christoffel(christoffel(w, v, b, pad), u, b, pad);
  out -= christoffel(christoffel(w, u, b, pad), v, b, pad);
  return out;
}

double sectional_direct(const VectorField& u, const VectorField& v, int pad) {
  return h1_inner(curvature_tensor(u, v, v, 2.0, pad), u);
}

double gamma_terms(const VectorField& u, const VectorField& v, int pad) {
  const VectorField guv = christoffel(u, v, 2.0, pad);
  return h1_inner(guv, guv) - h1_inner(christoffel(u, u, 2.0, pad), christoffel(v, v, 2.0, pad));
}

double r_term(const VectorField& u, const VectorField& v, Pairing pairing, int pad) {
  auto pair = [pairing](const VectorField& x, const VectorField& y) {
    return pairing == Pairing::metric ? h1_inner(x, y) : l2_inner(x, y);
  };
  auto gd = [pad](const VectorField& x, const VectorField& y) { return grad_dot(x, y, pad); };

  const VectorField uu = gd(u, u), uv = gd(u, v), vu = gd(v, u), vv = gd(v, v);
  double r = pair(uu, vv) - pair(uv, uv) + pair(vu, uv) - pair(vu, vu);
  r += pair(gd(uu, v), v) - pair(gd(uv, v), u) + pair(gd(vu, v), u) - pair(gd(vu, u), v);
  r += -pair(gd(v, uu), v) - pair(gd(u, vv), u) + pair(gd(v, vu), u) + pair(gd(u, vu), v);
  return r;
}

CurvatureReport sectional_formula(const VectorField& u, const VectorField& v, Pairing pairing, int pad) {
  CurvatureReport rep;
  rep.gamma_terms = gamma_terms(u, v, pad);
  rep.r_term = r_term(u, v, pairing, pad);
  rep.s_formula = rep.gamma_terms + rep.r_term;
  rep.s_direct = sectional_direct(u, v, pad);
  rep.agreement = std::abs(rep.s_formula - rep.s_direct);
  return rep;
}

namespace {

void require_admissible(double k, const char* name) {
  const double j = k / kTwoPi;
  if (!(j >= 0.5) || std::abs(j - std::round(j)) > 1e-9 * std::max(1.0, j))
    throw std::invalid_argument(std::string(name) + " must be a positive integer multiple of 2 pi, got " +
                                std::to_string(k));
}

}  // namespace

double closed_form_S(int i, double k1, double k2) {
  if (i != 1 && i != 2) throw std::invalid_argument("basis index must be 1 or 2");
  require_admissible(k1, "k1");
  require_admissible(k2, "k2");
  const double a = i == 1 ? k1 : k2, c = i == 1 ? k2 : k1;
  return (2.0 * a * a + c * c) / (8.0 * (1.0 + k1 * k1 + k2 * k2));
}

VectorField sine_product_field(const TorusGrid& grid, int j1, int j2) {
  const ScalarField s = ScalarField::from_function(grid, [&](double x, double y) {
    return std::sin(kTwoPi * j1 * x) * std::sin(kTwoPi * j2 * y);
  });
  return {s, s};
}

}  // namespace torusflow
