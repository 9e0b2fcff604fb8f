#pragma once

#include <functional>
#include <span>
#include <vector>

#include "torusflow/field.hpp"
#include "torusflow/spectral.hpp"

namespace torusflow {

// Lagrangian side: torus maps phi(z) = z + d(z) with periodic displacement d,
// the geodesic equation phi_tt = Gamma_phi(phi_t, phi_t) and the body/spatial
// dictionary.

inline constexpr double kDefaultDetFloor = 1e-3;

/// Orientation-preserving torus map stored through its periodic displacement.
class DiffeoMap {
 public:
  /// Throws OrientationLoss unless det(I + grad d) > 0 at every grid point.
  explicit DiffeoMap(VectorField displacement);

  static DiffeoMap identity(const TorusGrid& grid);
  /// z -> z + a.
  static DiffeoMap translation(const TorusGrid& grid, Point a);

  const TorusGrid& grid() const { return d_.grid(); }
  const VectorField& displacement() const { return d_; }

 private:
  VectorField d_;
};

/// phi(p) for arbitrary points, wrapped into [0,1)^2.
std::vector<Point> apply(const DiffeoMap& phi, std::span<const Point> points);
/// z + d(z) at the grid labels, not wrapped.
std::vector<Point> grid_image(const DiffeoMap& phi);

/// phi o psi. The displacement d_psi + d_phi o (id + d_psi) is shifted by an
/// integer vector so that its mean lies in [-1/2, 1/2)^2.
DiffeoMap compose(const DiffeoMap& phi, const DiffeoMap& psi);

struct InversionOptions {
  double tolerance = 1e-12;
  int max_iter = 100;
  double det_floor = kDefaultDetFloor;
};

/// Fixed-point iteration e <- -d(z + e) from e = -d. Throws OrientationLoss when
/// min det(grad phi) <= det_floor and InversionFailure when the update does not
/// fall below the tolerance within max_iter sweeps.
DiffeoMap invert(const DiffeoMap& phi, const InversionOptions& options = {});

/// grad phi = I + grad d.
JacobianField jacobian(const DiffeoMap& phi);
ScalarField jacobian_det(const DiffeoMap& phi);
double min_jacobian_det(const DiffeoMap& phi);

/// f o phi sampled at the grid labels.
ScalarField pull_back(const ScalarField& f, const DiffeoMap& phi);
VectorField pull_back(const VectorField& u, const DiffeoMap& phi);

/// Gamma(U o phi^-1, V o phi^-1) o phi.
VectorField christoffel_conjugated(const DiffeoMap& phi, const VectorField& U, const VectorField& V,
                                   double b, int pad = kDefaultPad);

/// Velocity as a function of time.
using VelocitySource = std::function<VectorField(double t)>;

struct FlowMap {
  double t = 0.0;
  DiffeoMap phi;
};

/// RK4 for phi_t = u(t, phi), phi(0) = id. The source is queried at t_n,
/// t_n + dt/2 and t_n + dt of every step. Records the initial map, every
/// `record_stride`-th step and the final map. Throws OrientationLoss once
/// min det(grad phi) <= det_floor.
std::vector<FlowMap> flow_from_velocity(const TorusGrid& grid, const VelocitySource& u, double t_end,
                                        double dt, int record_stride = 1,
                                        double det_floor = kDefaultDetFloor);

/// Source backed by stored Eulerian states; a query must match a stored time
/// to within 1e-9 (std::out_of_range otherwise).
VelocitySource sampled_velocity(std::vector<std::pair<double, VectorField>> samples);

struct GeodesicState {
  DiffeoMap phi;
  /// Material velocity at the grid labels.
  VectorField phi_t;
  double t = 0.0;
};

struct GeodesicOptions {
  double dt = 5e-4;
  double t_end = 0.2;
  int record_stride = 1;
  double det_floor = kDefaultDetFloor;
  int pad = kDefaultPad;
};

/// phi_tt = Gamma_phi(phi_t, phi_t), written as the first-order system
/// (d, V)' = (V, Gamma_phi(V, V)) and advanced by one RK4 step.
GeodesicState geodesic_step(const GeodesicState& state, double dt, double b,
                            const GeodesicOptions& options = {});

/// Geodesic from phi = id with phi_t = u0. Records as integrate() does.
std::vector<GeodesicState> geodesic_integrate(const VectorField& u0, double b,
                                              const GeodesicOptions& options = {});

/// phi(1) along the b = 2 geodesic with initial velocity u0, taking `steps`
/// equal RK4 steps.
DiffeoMap exp_map(const VectorField& u0, int steps = 200, double b = 2.0, int pad = kDefaultPad);

/// u = phi_t o phi^-1.
VectorField eulerian_velocity(const GeodesicState& state);

/// Ad_phi v = [(grad phi) v] o phi^-1.
VectorField adjoint(const DiffeoMap& phi, const VectorField& v);
/// Ad*_phi w = (grad phi)^T (w o phi) det(grad phi).
VectorField coadjoint(const DiffeoMap& phi, const VectorField& w);

/// U = (grad phi)^-1 phi_t.
VectorField body_velocity(const GeodesicState& state);
/// m0 = Ad*_phi m with m = (1 - Laplacian)(phi_t o phi^-1).
VectorField body_momentum(const GeodesicState& state);

/// max_t sup|m0(t) - m0(0)| / sup|m0(0)| along a trajectory.
double body_momentum_drift(std::span<const GeodesicState> trajectory);

/// Q(phi; U, V) = sum_i int { U_i V_i + [grad U_i^T (grad phi)^-1] . [grad V_i^T (grad phi)^-1] } det(grad phi),
/// by the trapezoidal rule on the grid.
double metric_at(const DiffeoMap& phi, const VectorField& U, const VectorField& V);

}  // namespace torusflow
