#pragma once

#include <array>
#include <complex>
#include <vector>

#include "torusflow/field.hpp"
#include "torusflow/spectral.hpp"

namespace torusflow {

// Mode-by-mode algebra behind the statement that among diagonal inertia
// multipliers A with A1 = 1, the b-equation is an Euler equation of a
// right-invariant metric only for b = 2 and A = 1 - Laplacian.

/// Integer mode (n1, n2) != (0, 0); its physical wavenumber is 2 pi (n1, n2).
struct ModeIndex {
  int n1 = 0;
  int n2 = 0;

  /// Throws std::invalid_argument for the zero mode.
  ModeIndex(int n1, int n2);

  double k1() const { return kTwoPi * n1; }
  double k2() const { return kTwoPi * n2; }
  /// (2 pi n1)^2 + (2 pi n2)^2.
  double k_squared() const { return k1() * k1() + k2() * k2(); }
};

/// Diagonals of
///   alpha_n = diag((k1 (b+1) + (b-1) k2) / (1 + k^2) + k1 + k2,  (k2 (b+1) + (b-1) k1) / (1 + k^2) + k1 + k2),
///   beta_n  = diag(3 k1 + k2, 3 k2 + k1),
/// with k = 2 pi n.
struct DiagonalPair {
  std::array<double, 2> alpha{};
  std::array<double, 2> beta{};
};

DiagonalPair build_diagonals(const ModeIndex& n, double b);

using ComplexPair = std::array<std::complex<double>, 2>;

/// max_i |(i (k1 + k2) - i alpha_i) c_i + i beta_i| for v_n = c e^{i k.z}.
double gl3_residual(const ModeIndex& n, double b, const ComplexPair& candidate);

/// (1 + k^2)(1, 1): the amplitude of (1 - Laplacian) e^{i k.z} 1.
ComplexPair helmholtz_candidate(const ModeIndex& n);
/// (2 / b)(1 + k^2)(1, 1).
ComplexPair scaled_candidate(const ModeIndex& n, double b);

/// sup-norm of
///   A^{-1}{ u.grad(Au) + (grad u)^T Au + Au div u } - L^{-1}{ u.grad(Lu) + (grad u)^T Lu + (b-1) Lu div u },
/// L = 1 - Laplacian, dealiased.
double gl1_residual(const VectorField& u, double b, const FourierMultiplier& inertia = FourierMultiplier::helmholtz(),
                    int pad = kDefaultPad);

/// amplitude * cos(k.z) (1, 1), the real part of the mode e^{i k.z} 1.
VectorField mode_field(const TorusGrid& grid, const ModeIndex& n, double amplitude);

struct TheoremRow {
  double b = 0.0;
  int n1 = 0;
  int n2 = 0;
  double gl3_residual = 0.0;
  double gl1_residual = 0.0;
  bool pass = false;
};

struct TheoremReport {
  std::vector<TheoremRow> rows;
  /// b values whose rows all pass.
  std::vector<double> consistent_b;
  /// True when the mode list is non-empty and consistent_b == {2}.
  bool b2_unique = false;
};

struct TheoremOptions {
  int grid_size = 32;
  double amplitude = 0.1;
  double tolerance = 1e-11;
  int pad = kDefaultPad;
};

/// For every (b, n): gl3 residual with the candidate (1 + k^2) 1 and gl1
/// residual on mode_field(n). A row passes when both are <= tolerance.
TheoremReport verify_theorem(const std::vector<double>& b_list, const std::vector<ModeIndex>& modes,
                             const TheoremOptions& options = {});

}  // namespace torusflow
