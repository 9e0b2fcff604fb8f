#include "torusflow/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusflow/dynamics.hpp"

namespace torusflow {

ModeIndex::ModeIndex(int a, int c) : n1(a), n2(c) {
  if (a == 0 && c == 0) throw std::invalid_argument("mode (0, 0) is not admitted");
}

DiagonalPair build_diagonals(const ModeIndex& n, double b) {
  const double k1 = n.k1(), k2 = n.k2(), q = 1.0 + n.k_squared();
  DiagonalPair d;
  d.alpha = {(k1 * (b + 1.0) + (b - 1.0) * k2) / q + k1 + k2, (k2 * (b + 1.0) + (b - 1.0) * k1) / q + k1 + k2};
  d.beta = {3.0 * k1 + k2, 3.0 * k2 + k1};
  return d;
}

double gl3_residual(const ModeIndex& n, double b, const ComplexPair& candidate) {
  using namespace std::complex_literals;
  const DiagonalPair d = build_diagonals(n, b);
  const double trace = n.k1() + n.k2();
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    worst = std::max(worst, std::abs(1i * (trace - d.alpha[i]) * candidate[i] + 1i * d.beta[i]));
  return worst;
}

ComplexPair helmholtz_candidate(const ModeIndex& n) {
  const double q = 1.0 + n.k_squared();
  return {q, q};
}

ComplexPair scaled_candidate(const ModeIndex& n, double b) {
  if (b == 0.0) throw std::invalid_argument("b must be nonzero");
  const double q = 2.0 / b * (1.0 + n.k_squared());
  return {q, q};
}

double gl1_residual(const VectorField& u, double b, const FourierMultiplier& inertia, int pad) {
  const VectorField lhs = transport_term(u, u, 2.0, inertia, pad);
  const VectorField rhs = transport_term(u, u, b, FourierMultiplier::helmholtz(), pad);
  return (lhs - rhs).sup_norm();
}

VectorField mode_field(const TorusGrid& grid, const ModeIndex& n, double amplitude) {
  const ScalarField c = ScalarField::from_function(grid, [&](double x, double y) {
    return amplitude * std::cos(n.k1() * x + n.k2() * y);
  });
  return {c, c};
}

TheoremReport verify_theorem(const std::vector<double>& b_list, const std::vector<ModeIndex>& modes,
                             const TheoremOptions& options) {
  const TorusGrid grid(options.grid_size, options.grid_size);
  TheoremReport report;
  for (double b : b_list) {
    bool all = true;
    for (const ModeIndex& n : modes) {
      TheoremRow row{b, n.n1, n.n2, gl3_residual(n, b, helmholtz_candidate(n)),
                     gl1_residual(mode_field(grid, n, options.amplitude), b, FourierMultiplier::helmholtz(),
                                  options.pad),
                     false};
      row.pass = row.gl3_residual <= options.tolerance && row.gl1_residual <= options.tolerance;
      all = all && row.pass;
      report.rows.push_back(row);
    }
    if (all) report.consistent_b.push_back(b);
  }
  report.b2_unique = !modes.empty() && report.consistent_b == std::vector<double>{2.0};
  return report;
}

}  // namespace torusflow
