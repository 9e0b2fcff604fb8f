#include "torusflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "torusflow/errors.hpp"

namespace torusflow {

TorusGrid::TorusGrid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 4 || ny < 4)
    throw std::invalid_argument("grid dimensions must be >= 4, got " + std::to_string(nx) + "x" +
                                std::to_string(ny));
  if (nx % 2 != 0 || ny % 2 != 0)
    throw std::invalid_argument("grid dimensions must be even, got " + std::to_string(nx) + "x" +
                                std::to_string(ny));
}

TorusGrid make_grid(int nx, int ny) { return TorusGrid(nx, ny); }

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b))
    throw GridMismatch("grid mismatch: " + std::to_string(a.nx()) + "x" + std::to_string(a.ny()) +
                       " vs " + std::to_string(b.nx()) + "x" + std::to_string(b.ny()));
}

// ScalarField

ScalarField::ScalarField(const TorusGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field size " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
}

ScalarField ScalarField::constant(const TorusGrid& grid, double c) {
  return ScalarField(grid, std::vector<double>(grid.size(), c));
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField collocation_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  std::vector<double> v(a.grid().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] * b[k];
  return ScalarField(a.grid(), std::move(v));
}

// VectorField

VectorField::VectorField(ScalarField u1, ScalarField u2) : c_{std::move(u1), std::move(u2)} {
  require_same_grid(c_[0].grid(), c_[1].grid());
}

VectorField VectorField::zero(const TorusGrid& grid) {
  return VectorField(ScalarField(grid), ScalarField(grid));
}

VectorField VectorField::constant(const TorusGrid& grid, double c1, double c2) {
  return VectorField(ScalarField::constant(grid, c1), ScalarField::constant(grid, c2));
}

double VectorField::sup_norm() const { return std::max(c_[0].sup_norm(), c_[1].sup_norm()); }

bool VectorField::all_finite() const { return c_[0].all_finite() && c_[1].all_finite(); }

VectorField& VectorField::operator+=(const VectorField& o) {
  c_[0] += o.c_[0];
  c_[1] += o.c_[1];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  c_[0] -= o.c_[0];
  c_[1] -= o.c_[1];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  c_[0] *= s;
  c_[1] *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator-(VectorField a) { return a *= -1.0; }
VectorField operator*(double s, VectorField a) { return a *= s; }

JacobianField::JacobianField(ScalarField d11, ScalarField d12, ScalarField d21, ScalarField d22)
    : e_{std::move(d11), std::move(d12), std::move(d21), std::move(d22)} {
  for (int k = 1; k < 4; ++k) require_same_grid(e_[0].grid(), e_[k].grid());
}

Spectrum::Spectrum(const TorusGrid& grid) : grid_(grid), c_(grid.size()) {}

Spectrum::Spectrum(const TorusGrid& grid, std::vector<std::complex<double>> coeffs)
    : grid_(grid), c_(std::move(coeffs)) {
  if (c_.size() != grid_.size())
    throw std::invalid_argument("spectrum size " + std::to_string(c_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
}

}  // namespace torusflow
