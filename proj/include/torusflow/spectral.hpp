#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "torusflow/field.hpp"

namespace torusflow {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Dealiasing refinement used for quadratic nonlinearities unless overridden.
inline constexpr int kDefaultPad = 2;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Analysis and synthesis.

Spectrum transform(const ScalarField& f);
/// Real part of the synthesis; the spectrum is expected to be conjugate-symmetric.
ScalarField inverse_transform(const Spectrum& s);

// Exact spectral differentiation. The unpaired Nyquist modes have zero derivative.

ScalarField partial_x(const ScalarField& f);
ScalarField partial_y(const ScalarField& f);
/// (grad u)(i, j) = d_j u_i.
JacobianField gradient(const VectorField& u);
ScalarField divergence(const VectorField& u);
ScalarField laplacian(const ScalarField& f);

/// Symbol-diagonal operator on periodic fields, acting componentwise on vectors.
///
/// The admitted family is real, even symbols with value 1 on the zero mode and
/// strictly positive elsewhere (so that A1 = 1 and A is a symmetric isomorphism).
class FourierMultiplier {
 public:
  using Symbol = std::function<double(int k1, int k2)>;

  /// 1 - Laplacian: symbol 1 + 4 pi^2 (k1^2 + k2^2).
  static FourierMultiplier helmholtz();
  /// Throws UnsupportedOperator for symbols outside the admitted family
  /// (checked on the modes of `grid`).
  static FourierMultiplier from_symbol(std::string name, Symbol symbol, const TorusGrid& grid);

  const std::string& name() const { return name_; }
  double symbol(int k1, int k2) const { return symbol_(k1, k2); }

  Spectrum apply(const Spectrum& s) const;
  Spectrum apply_inverse(const Spectrum& s) const;
  ScalarField apply(const ScalarField& f) const;
  ScalarField apply_inverse(const ScalarField& f) const;
  VectorField apply(const VectorField& u) const;
  VectorField apply_inverse(const VectorField& u) const;

 private:
  FourierMultiplier(std::string name, Symbol symbol) : name_(std::move(name)), symbol_(std::move(symbol)) {}

  std::string name_;
  Symbol symbol_;
};

inline double helmholtz_symbol(int k1, int k2) {
  return 1.0 + kTwoPi * kTwoPi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
}

/// m = (1 - Laplacian) u, componentwise.
VectorField helmholtz(const VectorField& u);
VectorField helmholtz_inverse(const VectorField& m);
ScalarField helmholtz(const ScalarField& f);
ScalarField helmholtz_inverse(const ScalarField& f);

// Integrals over the unit torus, evaluated by Parseval.

double l2_inner(const ScalarField& f, const ScalarField& g);
/// sum_i int u_i v_i.
double l2_inner(const VectorField& u, const VectorField& v);
/// int u . (1 - Laplacian) v; the right-invariant metric at the identity.
double h1_inner(const VectorField& u, const VectorField& v);

/// Product computed on a grid refined by `pad` and truncated back to the modes
/// |k| < n/2. Exact when the summed bandwidth of f and g stays below both the
/// refined Nyquist limit and n/2.
ScalarField pointwise_product(const ScalarField& f, const ScalarField& g, int pad = kDefaultPad);

/// Trigonometric interpolant of f at arbitrary points (Nyquist modes taken as
/// cosines). Cost O(nx ny) per point.
std::vector<double> eval_offgrid(const ScalarField& f, std::span<const Point> points);

/// Evaluates many fields of one grid at a fixed point set, sharing the
/// exponential tables between them.
class OffgridEvaluator {
 public:
  OffgridEvaluator(const TorusGrid& grid, std::span<const Point> points);
  ~OffgridEvaluator();
  OffgridEvaluator(OffgridEvaluator&&) noexcept;
  OffgridEvaluator& operator=(OffgridEvaluator&&) noexcept;

  std::size_t num_points() const;
  std::vector<double> evaluate(const Spectrum& s) const;
  std::vector<double> evaluate(const ScalarField& f) const;

 private:
  struct Tables;
  TorusGrid grid_;
  std::unique_ptr<Tables> tables_;
};

/// Random real vector field with modes |k1|, |k2| <= kmax, rescaled so that
/// the larger component sup-norm equals `amplitude`. Deterministic in `seed`.
/// Throws std::invalid_argument when kmax >= min(nx, ny)/2.
VectorField random_bandlimited(const TorusGrid& grid, std::uint64_t seed, int kmax, double amplitude);

// Spectral-domain building blocks shared by the dynamics modules.

/// Multiplies mode (k1, k2) by 2 pi i k_axis (axis 0 = x, 1 = y); Nyquist zeroed.
Spectrum derivative(const Spectrum& s, int axis);
/// Samples of the trigonometric interpolant on the (pad*nx) x (pad*ny) grid.
std::vector<double> upsample(const Spectrum& s, int pad);
/// Spectrum of fine-grid samples truncated to the paired modes |k| < n/2 of
/// `coarse`; the coarse Nyquist slots come back empty when pad > 1.
Spectrum downsample(const TorusGrid& coarse, std::span<const double> fine, int pad);

}  // namespace torusflow
