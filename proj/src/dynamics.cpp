#include "torusflow/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

using Fine = std::vector<double>;

std::array<Spectrum, 2> spectra(const VectorField& u) { return {transform(u[0]), transform(u[1])}; }

// Samples of a vector field and of its Jacobian on the refined grid.
struct PaddedVector {
  std::array<Fine, 2> value;
  std::array<std::array<Fine, 2>, 2> grad;  // grad[i][j] = d_j u_i
};

PaddedVector pad_with_gradient(const std::array<Spectrum, 2>& s, int pad) {
  PaddedVector p;
  for (int i = 0; i < 2; ++i) {
    p.value[i] = upsample(s[i], pad);
    for (int j = 0; j < 2; ++j) p.grad[i][j] = upsample(derivative(s[i], j), pad);
  }
  return p;
}

ScalarField truncate(const TorusGrid& g, const Fine& fine, int pad) {
  return inverse_transform(downsample(g, fine, pad));
}

}  // namespace

VectorField grad_dot(const VectorField& u, const VectorField& v, int pad) {
  const TorusGrid& g = u.grid();
  require_same_grid(g, v.grid());
  const PaddedVector pu = pad_with_gradient(spectra(u), pad);
  const std::array<Fine, 2> pv{upsample(transform(v[0]), pad), upsample(transform(v[1]), pad)};
  std::array<Fine, 2> out{Fine(pv[0].size()), Fine(pv[0].size())};
  for (int i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < out[i].size(); ++k)
      out[i][k] = pu.grad[i][0][k] * pv[0][k] + pu.grad[i][1][k] * pv[1][k];
  return {truncate(g, out[0], pad), truncate(g, out[1], pad)};
}

VectorField transport_term(const VectorField& u, const VectorField& v, double b,
                           const FourierMultiplier& inertia, int pad) {
  const TorusGrid& g = u.grid();
  require_same_grid(g, v.grid());
  const std::array<Spectrum, 2> su = spectra(u);
  const PaddedVector pm = pad_with_gradient({inertia.apply(su[0]), inertia.apply(su[1])}, pad);
  const PaddedVector pv = pad_with_gradient(spectra(v), pad);

  const std::size_t n = pm.value[0].size();
  std::array<Fine, 2> out{Fine(n), Fine(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double div_v = pv.grad[0][0][k] + pv.grad[1][1][k];
    for (int i = 0; i < 2; ++i) {
      const double convection = pv.value[0][k] * pm.grad[i][0][k] + pv.value[1][k] * pm.grad[i][1][k];
      const double stretching = pv.grad[0][i][k] * pm.value[0][k] + pv.grad[1][i][k] * pm.value[1][k];
      out[i][k] = convection + stretching + (b - 1.0) * pm.value[i][k] * div_v;
    }
  }
  return {inverse_transform(inertia.apply_inverse(downsample(g, out[0], pad))),
          inverse_transform(inertia.apply_inverse(downsample(g, out[1], pad)))};
}

VectorField b_operator(const VectorField& u, const VectorField& v, double b, int pad) {
  return -transport_term(u, v, b, FourierMultiplier::helmholtz(), pad);
}

VectorField christoffel(const VectorField& u, const VectorField& v, double b, int pad) {
  const FourierMultiplier a = FourierMultiplier::helmholtz();
  VectorField sum = grad_dot(u, v, pad) + grad_dot(v, u, pad);
  sum -= transport_term(u, v, b, a, pad);
  sum -= transport_term(v, u, b, a, pad);
  return 0.5 * std::move(sum);
}

VectorField euler_rhs(const VectorField& u, double b, int pad) {
  return -transport_term(u, u, b, FourierMultiplier::helmholtz(), pad);
}

VectorField euler_rhs_christoffel_form(const VectorField& u, double b, int pad) {
  return christoffel(u, u, b, pad) - grad_dot(u, u, pad);
}

VectorField commutator(const VectorField& u, const VectorField& v, int pad) {
  return grad_dot(u, v, pad) - grad_dot(v, u, pad);
}

VectorField ad_star(const VectorField& u, const VectorField& w, int pad) {
  const VectorField aw = helmholtz(w);
  const JacobianField gu = gradient(u);
  const JacobianField gaw = gradient(aw);
  const ScalarField div_u = divergence(u);
  auto component = [&](int i) {
    ScalarField s = pointwise_product(gu(0, i), aw[0], pad);
    s += pointwise_product(gu(1, i), aw[1], pad);
    s += pointwise_product(gaw(i, 0), u[0], pad);
    s += pointwise_product(gaw(i, 1), u[1], pad);
    s += pointwise_product(div_u, aw[i], pad);
    return s;
  };
  return helmholtz_inverse(VectorField(component(0), component(1)));
}

double check_commuting_identity(const VectorField& u, const VectorField& v, int pad) {
  require_same_grid(u.grid(), v.grid());
  const JacobianField gav = gradient(helmholtz(v));
  const JacobianField gv = gradient(v);
  const JacobianField gu = gradient(u);
  const JacobianField gvx = gradient(VectorField(partial_x(v[0]), partial_x(v[1])));
  const JacobianField gvy = gradient(VectorField(partial_y(v[0]), partial_y(v[1])));
  const VectorField lap_u(laplacian(u[0]), laplacian(u[1]));

  auto contract = [&](const JacobianField& m, int i, const ScalarField& a, const ScalarField& b) {
    return pointwise_product(m(i, 0), a, pad) + pointwise_product(m(i, 1), b, pad);
  };

  std::array<ScalarField, 2> residual{ScalarField(u.grid()), ScalarField(u.grid())};
  std::array<ScalarField, 2> transported{contract(gv, 0, u[0], u[1]), contract(gv, 1, u[0], u[1])};
  const VectorField a_transported = helmholtz(VectorField(transported[0], transported[1]));
  for (int i = 0; i < 2; ++i) {
    ScalarField lhs = contract(gav, i, u[0], u[1]) - a_transported[i];
    ScalarField rhs = contract(gv, i, lap_u[0], lap_u[1]);
    rhs += 2.0 * contract(gvx, i, gu(0, 0), gu(1, 0));
    rhs += 2.0 * contract(gvy, i, gu(0, 1), gu(1, 1));
    residual[i] = lhs - rhs;
  }
  return std::max(residual[0].sup_norm(), residual[1].sup_norm());
}

double check_metric_compatibility(const VectorField& u, const VectorField& v, const VectorField& w,
                                  double b, int pad) {
  const double lhs = h1_inner(grad_dot(v, u, pad), w) + h1_inner(grad_dot(w, u, pad), v);
  const double rhs = h1_inner(christoffel(u, v, b, pad), w) + h1_inner(christoffel(u, w, b, pad), v);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

double hamiltonian(const VectorField& u) { return 0.5 * h1_inner(u, u); }
double h1_energy(const VectorField& u) { return h1_inner(u, u); }

EulerState rk4_step(const EulerState& state, double dt, double b, int pad) {
  const VectorField& u = state.u;
  const VectorField k1 = euler_rhs(u, b, pad);
  const VectorField k2 = euler_rhs(u + (0.5 * dt) * k1, b, pad);
  const VectorField k3 = euler_rhs(u + (0.5 * dt) * k2, b, pad);
  const VectorField k4 = euler_rhs(u + dt * k3, b, pad);
  VectorField incr = k1 + k4;
  incr += 2.0 * (k2 + k3);
  return {state.t + dt, u + (dt / 6.0) * incr};
}

double recommended_dt(const TorusGrid& grid, double sup_u) {
  return 0.25 * std::min(1.0 / grid.nx(), 1.0 / grid.ny()) / std::max(1.0, sup_u);
}

std::vector<EulerState> integrate(const VectorField& u0, double b, const IntegrationOptions& options,
                                  const std::function<void(const EulerState&)>& observer) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(options.t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (options.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  if (!u0.all_finite()) throw std::invalid_argument("initial field has non-finite values");

  const double threshold = options.blowup_factor * u0.sup_norm();
  std::vector<EulerState> records;
  auto record = [&](const EulerState& s) {
    records.push_back(s);
    if (observer) observer(s);
  };

  // Whole steps of size dt; a shorter final step lands exactly on t_end.
  const auto full_steps = static_cast<long>(std::floor(options.t_end / options.dt * (1.0 + 1e-12)));
  const bool tail = options.t_end - full_steps * options.dt > 1e-12 * options.dt;
  const long total = full_steps + (tail ? 1 : 0);

  EulerState state{0.0, u0};
  record(state);
  for (long step = 1; step <= total; ++step) {
    const double t_next = step <= full_steps ? step * options.dt : options.t_end;
    state = rk4_step(state, t_next - state.t, b, options.pad);
    state.t = t_next;
    const double sup = state.u.sup_norm();
    if (!state.u.all_finite() || sup > threshold) {
      std::ostringstream msg;
      msg << "suspected blow-up at t=" << state.t << ": sup|u|=" << sup << " exceeds threshold "
          << threshold;
      if (!state.u.all_finite()) msg.str("suspected blow-up or instability: non-finite values at t=" +
                                          std::to_string(state.t));
      throw BlowUp(msg.str(), state.t);
    }
    if (step % options.record_stride == 0 || step == total) record(state);
  }
  return records;
}

double relative_drift(std::span<const double> series) {
  if (series.empty()) return 0.0;
  double worst = 0.0;
  for (double q : series) worst = std::max(worst, std::abs(q - series[0]));
  return worst / std::max(std::abs(series[0]), 1e-14);
}

ConservationReport conservation_report(std::span<const EulerState> trajectory) {
  ConservationReport r;
  for (const EulerState& s : trajectory) {
    r.times.push_back(s.t);
    r.h1_energy.push_back(h1_energy(s.u));
    r.hamiltonian.push_back(0.5 * r.h1_energy.back());
  }
  r.hamiltonian_drift = relative_drift(r.hamiltonian);
  r.h1_energy_drift = relative_drift(r.h1_energy);
  return r;
}

}  // namespace torusflow
