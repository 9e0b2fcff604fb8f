#include "torusflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "torusflow/dynamics.hpp"
#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

std::vector<Point> grid_points(const TorusGrid& g) {
  std::vector<Point> pts(g.size());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) pts[g.index(i, j)] = {g.x(i), g.y(j)};
  return pts;
}

// Grid labels shifted by a displacement field.
std::vector<Point> shifted_grid(const VectorField& d) {
  const TorusGrid& g = d.grid();
  std::vector<Point> pts = grid_points(g);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    pts[k].x += d[0][k];
    pts[k].y += d[1][k];
  }
  return pts;
}

VectorField evaluate_at(const OffgridEvaluator& ev, const VectorField& u) {
  const TorusGrid& g = u.grid();
  return {ScalarField(g, ev.evaluate(u[0])), ScalarField(g, ev.evaluate(u[1]))};
}

double min_det(const JacobianField& j) {
  double m = INFINITY;
  const std::size_t n = j.grid().size();
  for (std::size_t k = 0; k < n; ++k)
    m = std::min(m, j(0, 0)[k] * j(1, 1)[k] - j(0, 1)[k] * j(1, 0)[k]);
  return m;
}

double wrap_unit(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

void require_orientation(const DiffeoMap& phi, double floor) {
  const double m = min_jacobian_det(phi);
  if (!(m > floor)) {
    std::ostringstream msg;
    msg << "orientation loss: min det(grad phi) = " << m << " <= " << floor;
    throw OrientationLoss(msg.str());
  }
}

VectorField shift_mean_to_unit_cell(const VectorField& d) {
  const TorusGrid& g = d.grid();
  auto centred = [&](const ScalarField& f) {
    double mean = 0.0;
    for (double v : f.values()) mean += v;
    mean /= static_cast<double>(g.size());
    return f + ScalarField::constant(g, -std::floor(mean + 0.5));
  };
  return {centred(d[0]), centred(d[1])};
}

}  // namespace

DiffeoMap::DiffeoMap(VectorField displacement) : d_(std::move(displacement)) {
  if (!d_.all_finite()) throw OrientationLoss("displacement has non-finite values");
  require_orientation(*this, 0.0);
}

DiffeoMap DiffeoMap::identity(const TorusGrid& grid) { return DiffeoMap(VectorField::zero(grid)); }

DiffeoMap DiffeoMap::translation(const TorusGrid& grid, Point a) {
  return DiffeoMap(VectorField::constant(grid, a.x, a.y));
}

std::vector<Point> apply(const DiffeoMap& phi, std::span<const Point> points) {
  const OffgridEvaluator ev(phi.grid(), points);
  const std::vector<double> d1 = ev.evaluate(phi.displacement()[0]);
  const std::vector<double> d2 = ev.evaluate(phi.displacement()[1]);
  std::vector<Point> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k)
    out[k] = {wrap_unit(points[k].x + d1[k]), wrap_unit(points[k].y + d2[k])};
  return out;
}

std::vector<Point> grid_image(const DiffeoMap& phi) { return shifted_grid(phi.displacement()); }

DiffeoMap compose(const DiffeoMap& phi, const DiffeoMap& psi) {
  require_same_grid(phi.grid(), psi.grid());
  const OffgridEvaluator ev(phi.grid(), grid_image(psi));
  return DiffeoMap(shift_mean_to_unit_cell(psi.displacement() + evaluate_at(ev, phi.displacement())));
}

DiffeoMap invert(const DiffeoMap& phi, const InversionOptions& options) {
  require_orientation(phi, options.det_floor);
  const VectorField& d = phi.displacement();
  VectorField e = -d;
  double update = INFINITY;
  for (int it = 0; it < options.max_iter; ++it) {
    VectorField next = -evaluate_at(OffgridEvaluator(d.grid(), shifted_grid(e)), d);
    update = (next - e).sup_norm();
    e = std::move(next);
    if (!std::isfinite(update)) break;
    if (update < options.tolerance) return DiffeoMap(std::move(e));
  }
  std::ostringstream msg;
  msg << "inversion did not converge: last update " << update << " after " << options.max_iter
      << " iterations";
  throw InversionFailure(msg.str());
}

JacobianField jacobian(const DiffeoMap& phi) {
  const JacobianField gd = gradient(phi.displacement());
  const ScalarField one = ScalarField::constant(phi.grid(), 1.0);
  return {gd(0, 0) + one, gd(0, 1), gd(1, 0), gd(1, 1) + one};
}

ScalarField jacobian_det(const DiffeoMap& phi) {
  const JacobianField j = jacobian(phi);
  return collocation_product(j(0, 0), j(1, 1)) - collocation_product(j(0, 1), j(1, 0));
}

double min_jacobian_det(const DiffeoMap& phi) { return min_det(jacobian(phi)); }

ScalarField pull_back(const ScalarField& f, const DiffeoMap& phi) {
  require_same_grid(f.grid(), phi.grid());
  return ScalarField(f.grid(), OffgridEvaluator(f.grid(), grid_image(phi)).evaluate(f));
}

VectorField pull_back(const VectorField& u, const DiffeoMap& phi) {
  require_same_grid(u.grid(), phi.grid());
  return evaluate_at(OffgridEvaluator(u.grid(), grid_image(phi)), u);
}

VectorField christoffel_conjugated(const DiffeoMap& phi, const VectorField& U, const VectorField& V,
                                   double b, int pad) {
  const DiffeoMap inv = invert(phi);
  const OffgridEvaluator back(phi.grid(), grid_image(inv));
  const VectorField u = evaluate_at(back, U);
  const VectorField v = evaluate_at(back, V);
  return pull_back(christoffel(u, v, b, pad), phi);
}

std::vector<FlowMap> flow_from_velocity(const TorusGrid& grid, const VelocitySource& u, double t_end,
                                        double dt, int record_stride, double det_floor) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");

  auto rate = [&](double t, const VectorField& d) {
    const VectorField v = u(t);
    require_same_grid(grid, v.grid());
    return evaluate_at(OffgridEvaluator(grid, shifted_grid(d)), v);
  };

  const auto steps = static_cast<long>(std::llround(t_end / dt));
  VectorField d = VectorField::zero(grid);
  std::vector<FlowMap> out{{0.0, DiffeoMap(d)}};
  for (long s = 1; s <= steps; ++s) {
    const double t = (s - 1) * dt;
    const VectorField k1 = rate(t, d);
    const VectorField k2 = rate(t + 0.5 * dt, d + (0.5 * dt) * k1);
    const VectorField k3 = rate(t + 0.5 * dt, d + (0.5 * dt) * k2);
    const VectorField k4 = rate(t + dt, d + dt * k3);
    VectorField incr = k1 + k4;
    incr += 2.0 * (k2 + k3);
    d += (dt / 6.0) * incr;
    DiffeoMap phi(d);
    require_orientation(phi, det_floor);
    if (s % record_stride == 0 || s == steps) out.push_back({s * dt, std::move(phi)});
  }
  return out;
}

VelocitySource sampled_velocity(std::vector<std::pair<double, VectorField>> samples) {
  return [samples = std::move(samples)](double t) -> VectorField {
    for (const auto& [ts, v] : samples)
      if (std::abs(ts - t) <= 1e-9) return v;
    throw std::out_of_range("no velocity sample at t=" + std::to_string(t));
  };
}

namespace {

struct GeodesicRate {
  VectorField d_t;
  VectorField v_t;
};

GeodesicRate geodesic_rate(const VectorField& d, const VectorField& V, double b, const GeodesicOptions& o) {
  const DiffeoMap phi(d);
  require_orientation(phi, o.det_floor);
  const DiffeoMap inv = invert(phi, {.det_floor = o.det_floor});
  const VectorField u = evaluate_at(OffgridEvaluator(d.grid(), grid_image(inv)), V);
  return {V, pull_back(christoffel(u, u, b, o.pad), phi)};
}

}  // namespace

GeodesicState geodesic_step(const GeodesicState& state, double dt, double b, const GeodesicOptions& options) {
  const VectorField& d = state.phi.displacement();
  const VectorField& V = state.phi_t;
  const GeodesicRate k1 = geodesic_rate(d, V, b, options);
  const GeodesicRate k2 =
      geodesic_rate(d + (0.5 * dt) * k1.d_t, V + (0.5 * dt) * k1.v_t, b, options);
  const GeodesicRate k3 =
      geodesic_rate(d + (0.5 * dt) * k2.d_t, V + (0.5 * dt) * k2.v_t, b, options);
  const GeodesicRate k4 = geodesic_rate(d + dt * k3.d_t, V + dt * k3.v_t, b, options);
  VectorField dd = k1.d_t + k4.d_t;
  dd += 2.0 * (k2.d_t + k3.d_t);
  VectorField dv = k1.v_t + k4.v_t;
  dv += 2.0 * (k2.v_t + k3.v_t);
  GeodesicState next{DiffeoMap(d + (dt / 6.0) * dd), V + (dt / 6.0) * dv, state.t + dt};
  require_orientation(next.phi, options.det_floor);
  return next;
}

std::vector<GeodesicState> geodesic_integrate(const VectorField& u0, double b, const GeodesicOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(options.t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (options.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");

  const auto full_steps = static_cast<long>(std::floor(options.t_end / options.dt * (1.0 + 1e-12)));
  const bool tail = options.t_end - full_steps * options.dt > 1e-12 * options.dt;
  const long total = full_steps + (tail ? 1 : 0);

  GeodesicState state{DiffeoMap::identity(u0.grid()), u0, 0.0};
  std::vector<GeodesicState> records{state};
  for (long step = 1; step <= total; ++step) {
    const double t_next = step <= full_steps ? step * options.dt : options.t_end;
    state = geodesic_step(state, t_next - state.t, b, options);
    state.t = t_next;
    if (step % options.record_stride == 0 || step == total) records.push_back(state);
  }
  return records;
}

DiffeoMap exp_map(const VectorField& u0, int steps, double b, int pad) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  GeodesicOptions o;
  o.pad = pad;
  const double dt = 1.0 / steps;
  GeodesicState state{DiffeoMap::identity(u0.grid()), u0, 0.0};
  for (int s = 0; s < steps; ++s) state = geodesic_step(state, dt, b, o);
  return state.phi;
}

VectorField eulerian_velocity(const GeodesicState& state) {
  return pull_back(state.phi_t, invert(state.phi));
}

namespace {

// (grad phi) v or (grad phi)^T w, pointwise.
VectorField contract(const JacobianField& j, const VectorField& v, bool transpose) {
  auto row = [&](int i) {
    const int a = transpose ? 0 : i, b = transpose ? i : 0;
    const int c = transpose ? 1 : i, e = transpose ? i : 1;
    return collocation_product(j(a, b), v[0]) + collocation_product(j(c, e), v[1]);
  };
  return {row(0), row(1)};
}

VectorField scaled(const ScalarField& s, const VectorField& v) {
  return {collocation_product(s, v[0]), collocation_product(s, v[1])};
}

}  // namespace

VectorField adjoint(const DiffeoMap& phi, const VectorField& v) {
  return pull_back(contract(jacobian(phi), v, false), invert(phi));
}

VectorField coadjoint(const DiffeoMap& phi, const VectorField& w) {
  return scaled(jacobian_det(phi), contract(jacobian(phi), pull_back(w, phi), true));
}

VectorField body_velocity(const GeodesicState& state) {
  const JacobianField j = jacobian(state.phi);
  const TorusGrid& g = state.phi.grid();
  std::vector<double> u1(g.size()), u2(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = j(0, 0)[k], b = j(0, 1)[k], c = j(1, 0)[k], d = j(1, 1)[k];
    const double det = a * d - b * c;
    if (!(det > 0.0)) throw OrientationLoss("singular grad phi in body_velocity");
    const double v1 = state.phi_t[0][k], v2 = state.phi_t[1][k];
    u1[k] = (d * v1 - b * v2) / det;
    u2[k] = (-c * v1 + a * v2) / det;
  }
  return {ScalarField(g, std::move(u1)), ScalarField(g, std::move(u2))};
}

VectorField body_momentum(const GeodesicState& state) {
  return coadjoint(state.phi, helmholtz(eulerian_velocity(state)));
}

double body_momentum_drift(std::span<const GeodesicState> trajectory) {
  if (trajectory.empty()) return 0.0;
  const VectorField m0 = body_momentum(trajectory.front());
  const double scale = std::max(m0.sup_norm(), 1e-14);
  double worst = 0.0;
  for (const GeodesicState& s : trajectory) worst = std::max(worst, (body_momentum(s) - m0).sup_norm());
  return worst / scale;
}

double metric_at(const DiffeoMap& phi, const VectorField& U, const VectorField& V) {
  require_same_grid(phi.grid(), U.grid());
  require_same_grid(phi.grid(), V.grid());
  const JacobianField j = jacobian(phi);
  const JacobianField gu = gradient(U), gv = gradient(V);
  const std::size_t n = phi.grid().size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = j(0, 0)[k], b = j(0, 1)[k], c = j(1, 0)[k], d = j(1, 1)[k];
    const double det = a * d - b * c;
    if (!(det > 0.0)) throw OrientationLoss("singular grad phi in metric_at");
    // Rows of (grad phi)^-1.
    const double r00 = d / det, r01 = -b / det, r10 = -c / det, r11 = a / det;
    double local = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double pu0 = gu(i, 0)[k] * r00 + gu(i, 1)[k] * r10;
      const double pu1 = gu(i, 0)[k] * r01 + gu(i, 1)[k] * r11;
      const double pv0 = gv(i, 0)[k] * r00 + gv(i, 1)[k] * r10;
      const double pv1 = gv(i, 0)[k] * r01 + gv(i, 1)[k] * r11;
      local += U[i][k] * V[i][k] + pu0 * pv0 + pu1 * pv1;
    }
    sum += local * det;
  }
  return sum / static_cast<double>(n);
}

}  // namespace torusflow
