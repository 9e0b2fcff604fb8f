#pragma once

#include <utility>
#include <vector>

#include "torusflow/field.hpp"
#include "torusflow/spectral.hpp"

namespace torusflow {

/// Real periodic function on [0,1) sampled at x_i = i/n (n even, >= 4).
class LineField {
 public:
  explicit LineField(int n);
  explicit LineField(std::vector<double> values);

  template <class F>
  static LineField from_function(int n, F&& f) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) / n);
    return LineField(std::move(v));
  }

  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  double sup_norm() const;

  LineField& operator+=(const LineField& o);
  LineField& operator-=(const LineField& o);
  LineField& operator*=(double s);

 private:
  std::vector<double> v_;
};

LineField operator+(LineField a, const LineField& b);
LineField operator-(LineField a, const LineField& b);
LineField operator*(double s, LineField a);

LineField line_derivative(const LineField& f);
/// (1 - d_xx)^{-1} and 1 - d_xx.
LineField line_helmholtz(const LineField& f);
LineField line_helmholtz_inverse(const LineField& f);
LineField line_product(const LineField& f, const LineField& g, int pad = kDefaultPad);

/// du/dt of the 1D b-equation m_t = -m_x u - b u_x m, m = u - u_xx.
LineField rhs_1d_b(const LineField& u, double b, int pad = kDefaultPad);

/// RK4 integration of the 1D b-equation with a fixed step.
LineField integrate_1d_b(const LineField& u0, double b, double dt, double t_end, int pad = kDefaultPad);

/// (q_t, rho_t) of the modified two-component Camassa-Holm system
///   q_t + v q_x + 2 q v_x + rho (1 - d_xx)^{-1} rho_x = 0,  rho_t + (rho v)_x = 0,
/// where q = v - v_xx.
std::pair<LineField, LineField> mch2_rhs(const LineField& v, const LineField& rho, int pad = kDefaultPad);

/// u(x, y) = (a(x), b(x)) on `grid`; both profiles must have grid.nx() samples.
VectorField embed_y_independent(const TorusGrid& grid, const LineField& a, const LineField& b);
/// Samples f(x_i, y_row) for i = 0..nx-1.
LineField x_profile(const ScalarField& f, int row = 0);

}  // namespace torusflow
