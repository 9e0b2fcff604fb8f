#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace torusflow {

/// Uniform nx x ny sampling of the unit torus [0,1)^2.
///
/// Samples sit at x_i = i/nx, y_j = j/ny. Storage everywhere in the library is
/// row-major with x as the slow index: value (i, j) lives at i*ny + j. Spectral
/// index (p, q) follows FFT ordering; signed mode numbers lie in
/// [-nx/2, nx/2) x [-ny/2, ny/2) and carry physical wavenumber 2*pi*mode.
class TorusGrid {
 public:
  /// Throws std::invalid_argument unless both sizes are even and >= 4.
  TorusGrid(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny_ + j; }

  double x(int i) const { return static_cast<double>(i) / nx_; }
  double y(int j) const { return static_cast<double>(j) / ny_; }

  /// Signed mode of FFT slot p along x (resp. q along y).
  int mode_x(int p) const { return p < nx_ / 2 ? p : p - nx_; }
  int mode_y(int q) const { return q < ny_ / 2 ? q : q - ny_; }
  /// FFT slot of a signed mode; the mode must lie in the admissible range.
  int slot_x(int k) const { return k >= 0 ? k : k + nx_; }
  int slot_y(int k) const { return k >= 0 ? k : k + ny_; }

  bool operator==(const TorusGrid&) const = default;

 private:
  int nx_;
  int ny_;
};

TorusGrid make_grid(int nx, int ny);

/// Throws GridMismatch when the two grids differ.
void require_same_grid(const TorusGrid& a, const TorusGrid& b);

/// Real periodic field given by its point samples.
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid);
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  template <class F>
  static ScalarField from_function(const TorusGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (int i = 0; i < grid.nx(); ++i)
      for (int j = 0; j < grid.ny(); ++j) v[grid.index(i, j)] = f(grid.x(i), grid.y(j));
    return ScalarField(grid, std::move(v));
  }
  static ScalarField constant(const TorusGrid& grid, double c);

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const { return values_[k]; }

  double sup_norm() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product of samples, no dealiasing. Used where the operands are
/// compositions (not band-limited) and only collocation makes sense.
ScalarField collocation_product(const ScalarField& a, const ScalarField& b);

/// A pair (u1, u2) of scalar fields on one grid.
class VectorField {
 public:
  VectorField(ScalarField u1, ScalarField u2);
  static VectorField zero(const TorusGrid& grid);
  static VectorField constant(const TorusGrid& grid, double c1, double c2);

  const TorusGrid& grid() const { return c_[0].grid(); }
  const ScalarField& operator[](int i) const { return c_[i]; }
  const ScalarField& u1() const { return c_[0]; }
  const ScalarField& u2() const { return c_[1]; }

  /// max over both components of |u_i|.
  double sup_norm() const;
  bool all_finite() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);

 private:
  std::array<ScalarField, 2> c_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator-(VectorField a);
VectorField operator*(double s, VectorField a);

/// Entries d_j u_i; row i is the component, column j the direction.
class JacobianField {
 public:
  JacobianField(ScalarField d11, ScalarField d12, ScalarField d21, ScalarField d22);

  const ScalarField& operator()(int i, int j) const { return e_[2 * i + j]; }
  const TorusGrid& grid() const { return e_[0].grid(); }

 private:
  std::array<ScalarField, 4> e_;
};

/// Complex Fourier coefficients of a real field in FFT slot order.
///
/// Normalization: f(x,y) = sum c_{k1,k2} exp(2 pi i (k1 x + k2 y)), so the
/// constant field 1 has c_{0,0} = 1 and mean |f|^2 = sum |c|^2.
class Spectrum {
 public:
  explicit Spectrum(const TorusGrid& grid);
  Spectrum(const TorusGrid& grid, std::vector<std::complex<double>> coeffs);

  const TorusGrid& grid() const { return grid_; }
  std::span<const std::complex<double>> coeffs() const { return c_; }
  std::span<std::complex<double>> coeffs() { return c_; }
  /// Coefficient of the signed mode (k1, k2).
  std::complex<double> mode(int k1, int k2) const {
    return c_[grid_.index(grid_.slot_x(k1), grid_.slot_y(k2))];
  }

 private:
  TorusGrid grid_;
  std::vector<std::complex<double>> c_;
};

}  // namespace torusflow
