#pragma once

#include <functional>
#include <span>
#include <vector>

#include "torusflow/field.hpp"
#include "torusflow/spectral.hpp"

namespace torusflow {

// Eulerian side of the two-dimensional b-equation
//
//   m_t = -u . grad m - (grad u)^T m - (b - 1) m div u,   m = (1 - Laplacian) u.
//
// Every quadratic term is formed on a grid refined by `pad` and truncated, so
// band-limited inputs whose summed bandwidth fits the refined grid are handled
// without aliasing error.

/// (grad u . v)_i = sum_j d_j u_i v_j, dealiased.
VectorField grad_dot(const VectorField& u, const VectorField& v, int pad = kDefaultPad);

/// A^{-1}{ v . grad(Au) + (grad v)^T Au + (b - 1) Au div v } for a diagonal
/// inertia multiplier A. With A = 1 - Laplacian this is -B(u, v).
VectorField transport_term(const VectorField& u, const VectorField& v, double b,
                           const FourierMultiplier& inertia, int pad = kDefaultPad);

/// B(u, v) = -A^{-1}{ v . grad(Au) + (grad v)^T Au + (b - 1) Au div v }.
VectorField b_operator(const VectorField& u, const VectorField& v, double b, int pad = kDefaultPad);

/// Gamma(u, v) = (grad u . v + grad v . u + B(u, v) + B(v, u)) / 2. Symmetric.
VectorField christoffel(const VectorField& u, const VectorField& v, double b, int pad = kDefaultPad);

/// du/dt = -A^{-1}{ u . grad(Au) + (grad u)^T Au + (b - 1) Au div u }.
VectorField euler_rhs(const VectorField& u, double b, int pad = kDefaultPad);

/// The same right-hand side written as -grad u . u + Gamma(u, u).
VectorField euler_rhs_christoffel_form(const VectorField& u, double b, int pad = kDefaultPad);

/// [u, v] = grad u . v - grad v . u.
VectorField commutator(const VectorField& u, const VectorField& v, int pad = kDefaultPad);

/// ad*_u w = A^{-1}{ (grad u)^T Aw + grad(Aw) . u + (div u) Aw }. Assembled from
/// the public fourier_core operations, independently of transport_term.
VectorField ad_star(const VectorField& u, const VectorField& w, int pad = kDefaultPad);

/// Max-norm of  u.grad(Av) - A(grad v . u) - (grad v . Lap u + 2 grad v_x . u_x + 2 grad v_y . u_y).
double check_commuting_identity(const VectorField& u, const VectorField& v, int pad = kDefaultPad);

/// |LHS - RHS| / (1 + |LHS|) for
///   int (grad v.u) . Aw + (grad w.u) . Av  =  int Gamma(u,v) . Aw + Gamma(u,w) . Av,
/// with Gamma taken at parameter b (the identity holds for b = 2).
double check_metric_compatibility(const VectorField& u, const VectorField& v, const VectorField& w,
                                  double b = 2.0, int pad = kDefaultPad);

/// l(u) = 1/2 int u . m.
double hamiltonian(const VectorField& u);
/// <u, u> = int u . Au.
double h1_energy(const VectorField& u);

struct EulerState {
  double t = 0.0;
  VectorField u;

  VectorField momentum() const { return helmholtz(u); }
};

/// One classical fourth-order Runge-Kutta step.
EulerState rk4_step(const EulerState& state, double dt, double b, int pad = kDefaultPad);

struct IntegrationOptions {
  double dt = 1e-3;
  double t_end = 0.1;
  int record_stride = 1;
  /// Abort once sup|u| exceeds blowup_factor * sup|u0|.
  double blowup_factor = 1e3;
  int pad = kDefaultPad;
};

/// Largest step recommended for a field of size `sup_u` on `grid`.
double recommended_dt(const TorusGrid& grid, double sup_u);

/// Integrates from t = 0 to t_end. Records the initial state, every
/// record_stride-th step and the final state; each record is also passed to
/// `observer` as it is produced. Throws BlowUp on non-finite values or when
/// the blow-up threshold is crossed (records made so far were already observed).
std::vector<EulerState> integrate(const VectorField& u0, double b, const IntegrationOptions& options,
                                  const std::function<void(const EulerState&)>& observer = {});

struct ConservationReport {
  std::vector<double> times;
  std::vector<double> hamiltonian;
  std::vector<double> h1_energy;
  double hamiltonian_drift = 0.0;
  double h1_energy_drift = 0.0;
};

/// max_k |q_k - q_0| / max(|q_0|, 1e-14).
double relative_drift(std::span<const double> series);

ConservationReport conservation_report(std::span<const EulerState> trajectory);

}  // namespace torusflow
