#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "torusflow/dynamics.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/reduction.hpp"

using namespace torusflow;
using test::max_abs_diff;

namespace {

const TorusGrid kGrid(32, 32);

VectorField rnd(std::uint64_t seed, int kmax = 3, double amp = 1.0, const TorusGrid& g = kGrid) {
  return random_bandlimited(g, seed, kmax, amp);
}

VectorField e1(const TorusGrid& g = kGrid) { return VectorField::constant(g, 1.0, 0.0); }

}  // namespace

TEST_CASE("B and Gamma on constants and on e1") {
  const VectorField c = VectorField::constant(kGrid, 0.7, -1.3);
  const VectorField v = rnd(1);
  for (double b : {2.0, 3.0}) {
    CHECK(b_operator(c, c, b).sup_norm() < 1e-14);
    CHECK(christoffel(c, c, b).sup_norm() < 1e-14);
  }
  CHECK(max_abs_diff(b_operator(v, e1(), 2.0), VectorField(-partial_x(v[0]), -partial_x(v[1]))) < 1e-11);

  // -A^{-1}[(grad v)^T e1 + e1 div v].
  const ScalarField div = divergence(v);
  const VectorField inner(partial_x(v[0]) + div, partial_y(v[0]));
  const VectorField expect = -1.0 * helmholtz_inverse(inner);
  CHECK(max_abs_diff(b_operator(e1(), v, 2.0), expect) < 1e-12);
  CHECK(max_abs_diff(christoffel(e1(), v, 2.0), 0.5 * expect) < 1e-11);
}

TEST_CASE("Gamma is symmetric and bilinear") {
  const VectorField u = rnd(2), v = rnd(3), w = rnd(4);
  for (double b : {2.0, 2.5, 3.0}) {
    CHECK(max_abs_diff(christoffel(u, v, b), christoffel(v, u, b)) < 1e-12 * christoffel(u, v, b).sup_norm());
    const VectorField lhs = christoffel(2.0 * u + w, v, b);
    const VectorField rhs = 2.0 * christoffel(u, v, b) + christoffel(w, v, b);
    CHECK(max_abs_diff(lhs, rhs) < 1e-11 * rhs.sup_norm());
  }
  CHECK_THROWS_AS(christoffel(u, rnd(5, 2, 1.0, TorusGrid(16, 16)), 2.0), GridMismatch);
}

TEST_CASE("both forms of the Euler right-hand side agree") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const VectorField u = rnd(seed);
    for (double b : {2.0, 2.5, 3.0}) {
      const VectorField direct = euler_rhs(u, b);
      CHECK(max_abs_diff(direct, euler_rhs_christoffel_form(u, b)) < 1e-11 * std::max(1.0, direct.sup_norm()));
    }
  }
}

TEST_CASE("constants are equilibria") {
  const VectorField c = VectorField::constant(kGrid, 0.3, 0.4);
  for (double b : {0.5, 2.0, 2.5, 3.0, 7.0}) CHECK(euler_rhs(c, b).sup_norm() == 0.0);

  IntegrationOptions opt;
  opt.dt = 0.01;
  opt.t_end = 0.2;
  const auto traj = integrate(c, 3.0, opt);
  CHECK(traj.size() == 21);
  for (const auto& s : traj) CHECK(max_abs_diff(s.u, c) == 0.0);
}

TEST_CASE("ad* matches the Euler right-hand side at b = 2") {
  const VectorField w = rnd(11);
  CHECK(ad_star(VectorField::zero(kGrid), w).sup_norm() == 0.0);

  const VectorField c = VectorField::constant(kGrid, 0.5, -2.0);
  const VectorField aw = helmholtz(w);
  const VectorField transport(0.5 * partial_x(aw[0]) - 2.0 * partial_y(aw[0]),
                              0.5 * partial_x(aw[1]) - 2.0 * partial_y(aw[1]));
  CHECK(max_abs_diff(ad_star(c, w), helmholtz_inverse(transport)) < 1e-11);

  for (std::uint64_t seed : {12u, 13u}) {
    const VectorField u = rnd(seed);
    const VectorField rhs = euler_rhs(u, 2.0);
    CHECK(max_abs_diff(-1.0 * ad_star(u, u), rhs) < 1e-11 * std::max(1.0, rhs.sup_norm()));
  }
}

TEST_CASE("commutator is a Lie bracket") {
  const VectorField u = rnd(21), v = rnd(22), w = rnd(23);
  CHECK(commutator(u, u).sup_norm() < 1e-12);
  CHECK(max_abs_diff(commutator(u, v), -1.0 * commutator(v, u)) < 1e-12);
  CHECK(max_abs_diff(commutator(e1(), v), VectorField(-partial_x(v[0]), -partial_x(v[1]))) < 1e-12);
  CHECK(max_abs_diff(commutator(2.0 * u + w, v), 2.0 * commutator(u, v) + commutator(w, v)) < 1e-10);

  // Bandwidth 9 after two brackets still fits a 64 grid with pad 2.
  const TorusGrid g(64, 64);
  const VectorField a = rnd(24, 3, 1.0, g), b = rnd(25, 3, 1.0, g), c = rnd(26, 3, 1.0, g);
  const VectorField jac =
      commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
  CHECK(jac.sup_norm() < 1e-10);
}

TEST_CASE("commuting identity") {
  const TorusGrid& g = kGrid;
  const VectorField zero = VectorField::zero(g);
  CHECK(check_commuting_identity(zero, zero) == 0.0);
  CHECK(check_commuting_identity(e1(g), rnd(31, 3, 1.0, g)) < 1e-10);
  for (std::uint64_t seed : {32u, 34u}) CHECK(check_commuting_identity(rnd(seed, 3, 1.0, g), rnd(seed + 1, 3, 1.0, g)) < 1e-10);
}

TEST_CASE("metric compatibility holds only at b = 2") {
  const TorusGrid g(64, 64);
  const VectorField zero = VectorField::zero(g);
  CHECK(check_metric_compatibility(zero, zero, zero) == 0.0);
  const VectorField v = rnd(41, 3, 1.0, g);
  CHECK(check_metric_compatibility(e1(g), v, v) < 1e-10);
  const VectorField u = rnd(42, 3, 1.0, g), w = rnd(43, 3, 1.0, g);
  CHECK(check_metric_compatibility(u, v, w) < 1e-10);
  CHECK(check_metric_compatibility(u, v, w, 3.0) > 1e-3);
}

TEST_CASE("energy functionals") {
  const TorusGrid g(16, 16);
  CHECK(hamiltonian(VectorField::zero(g)) == 0.0);
  CHECK(hamiltonian(VectorField::constant(g, 1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const VectorField s(ScalarField::from_function(g, [](double x, double) { return std::sin(kTwoPi * x); }),
                      ScalarField(g));
  CHECK(hamiltonian(s) == doctest::Approx((1.0 + kTwoPi * kTwoPi) / 4.0).epsilon(1e-14));
  const VectorField u = rnd(51, 3, 1.0, g);
  CHECK(hamiltonian(u) > 0.0);
  CHECK(h1_energy(u) == doctest::Approx(2.0 * hamiltonian(u)).epsilon(1e-14));
}

TEST_CASE("drift metric") {
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(relative_drift(flat) == 0.0);
  const std::vector<double> series{2.0, 2.5, 1.0};
  CHECK(relative_drift(series) == doctest::Approx(0.5));
  const std::vector<double> zero{0.0, 1e-15};
  CHECK(relative_drift(zero) == doctest::Approx(0.1));
}

TEST_CASE("integrate records at the stride and the final time") {
  IntegrationOptions opt;
  opt.dt = 0.01;
  opt.t_end = 0.105;
  opt.record_stride = 4;
  int observed = 0;
  const auto traj = integrate(rnd(61, 2, 0.02), 2.0, opt, [&](const EulerState&) { ++observed; });
  REQUIRE(traj.size() >= 3);
  CHECK(traj.front().t == 0.0);
  CHECK(traj[1].t == doctest::Approx(0.04));
  CHECK(traj.back().t == doctest::Approx(0.105));
  CHECK(observed == static_cast<int>(traj.size()));
  CHECK(recommended_dt(kGrid, 0.5) == doctest::Approx(0.25 / 32.0));
  CHECK(recommended_dt(kGrid, 4.0) == doctest::Approx(0.25 / 32.0 / 4.0));
}

TEST_CASE("energy is conserved at b = 2 and not at b = 3") {
  IntegrationOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 0.5;
  opt.record_stride = 50;
  const VectorField u0 = rnd(1, 3, 0.02);
  CHECK(conservation_report(integrate(u0, 2.0, opt)).hamiltonian_drift <= 1e-6);
  CHECK(conservation_report(integrate(u0, 3.0, opt)).hamiltonian_drift > 1e-3);
}

TEST_CASE("RK4 self-convergence") {
  const VectorField u0 = rnd(1, 3, 0.02);
  const double t_end = 0.5;
  auto terminal = [&](double dt) {
    IntegrationOptions opt;
    opt.dt = dt;
    opt.t_end = t_end;
    opt.record_stride = 1000000;
    return integrate(u0, 2.0, opt).back().u;
  };
  const std::vector<double> ladder{0.05, 0.025, 0.0125};
  const VectorField ref = terminal(ladder.back() / 8.0);
  std::vector<double> err;
  for (double dt : ladder) err.push_back(max_abs_diff(terminal(dt), ref));
  for (std::size_t k = 0; k + 1 < err.size(); ++k) {
    const double ratio = err[k] / err[k + 1];
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("blow-up and instability are reported") {
  IntegrationOptions opt;
  opt.dt = 0.01;
  opt.t_end = 1.0;
  opt.blowup_factor = 1.5;
  int observed = 0;
  const VectorField u0 = rnd(71, 3, 50.0);
  try {
    integrate(u0, 2.0, opt, [&](const EulerState&) { ++observed; });
    FAIL("expected BlowUp");
  } catch (const BlowUp& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 1.0);
    CHECK(observed >= 1);
  }
}

TEST_CASE("1D line operations") {
  const int n = 32;
  const LineField s = LineField::from_function(n, [](double x) { return std::sin(kTwoPi * x); });
  const LineField c = LineField::from_function(n, [](double x) { return kTwoPi * std::cos(kTwoPi * x); });
  CHECK((line_derivative(s) - c).sup_norm() < 1e-12);
  CHECK((line_helmholtz(s) - (1.0 + kTwoPi * kTwoPi) * s).sup_norm() < 1e-11);
  CHECK((line_helmholtz_inverse(line_helmholtz(s)) - s).sup_norm() < 1e-14);
  const LineField sq = LineField::from_function(n, [](double x) { return 0.5 - 0.5 * std::cos(2 * kTwoPi * x); });
  CHECK((line_product(s, s) - sq).sup_norm() < 1e-14);
  CHECK_THROWS(LineField(5));
}

TEST_CASE("2D dynamics reduce to the 1D b-equation") {
  const LineField cst(std::vector<double>(32, 0.4));
  CHECK(rhs_1d_b(cst, 3.0).sup_norm() == 0.0);

  const LineField g = x_profile(rnd(81)[0]);
  const VectorField u = embed_y_independent(kGrid, g, LineField(32));
  for (double b : {2.0, 3.0}) {
    const VectorField rhs = euler_rhs(u, b);
    CHECK(rhs[1].sup_norm() < 1e-14);
    CHECK((x_profile(rhs[0]) - rhs_1d_b(g, b)).sup_norm() < 1e-11 * std::max(1.0, rhs.sup_norm()));
    for (int row : {0, 5, 31}) CHECK((x_profile(rhs[0], row) - x_profile(rhs[0])).sup_norm() < 1e-13);
  }

  const LineField small = LineField::from_function(32, [](double x) { return 0.01 * std::sin(kTwoPi * x); });
  IntegrationOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 0.1;
  opt.record_stride = 1000;
  const auto traj = integrate(embed_y_independent(kGrid, small, LineField(32)), 3.0, opt);
  const LineField oracle = integrate_1d_b(small, 3.0, 1e-3, 0.1);
  CHECK((x_profile(traj.back().u[0]) - oracle).sup_norm() <= 1e-9);
  CHECK(traj.back().u[1].sup_norm() == 0.0);
}

TEST_CASE("MCH2 system from y-independent b = 2 dynamics") {
  const LineField zero(32);
  const auto [q0, r0] = mch2_rhs(zero, zero);
  CHECK(q0.sup_norm() == 0.0);
  CHECK(r0.sup_norm() == 0.0);

  const VectorField seed = rnd(91);
  const LineField v = x_profile(seed[0]);
  const LineField rho = x_profile(seed[1], 3);

  const auto [qt_ch, rt_ch] = mch2_rhs(v, zero);
  CHECK((qt_ch - line_helmholtz(rhs_1d_b(v, 2.0))).sup_norm() < 1e-10 * std::max(1.0, qt_ch.sup_norm()));
  CHECK(rt_ch.sup_norm() == 0.0);

  const auto [qt, rt] = mch2_rhs(v, rho);
  const VectorField rhs = euler_rhs(embed_y_independent(kGrid, v, line_helmholtz_inverse(rho)), 2.0);
  const LineField qt2d = line_helmholtz(x_profile(rhs[0]));
  const LineField rt2d = line_helmholtz(x_profile(rhs[1]));
  CHECK((qt - qt2d).sup_norm() < 1e-10 * std::max(1.0, qt.sup_norm()));
  CHECK((rt - rt2d).sup_norm() < 1e-10 * std::max(1.0, rt.sup_norm()));

  CHECK_THROWS(embed_y_independent(kGrid, LineField(16), LineField(16)));
}
