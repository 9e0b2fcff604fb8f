#include "torusflow/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "torusflow/errors.hpp"
#include "torusflow/fft.hpp"

namespace torusflow {

using cplx = std::complex<double>;

Spectrum transform(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  std::vector<cplx> buf(f.values().begin(), f.values().end());
  detail::dft2d(buf, g.nx(), g.ny(), -1);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (cplx& c : buf) c *= scale;
  return Spectrum(g, std::move(buf));
}

ScalarField inverse_transform(const Spectrum& s) {
  const TorusGrid& g = s.grid();
  std::vector<cplx> buf(s.coeffs().begin(), s.coeffs().end());
  detail::dft2d(buf, g.nx(), g.ny(), +1);
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = buf[k].real();
  return ScalarField(g, std::move(v));
}

Spectrum derivative(const Spectrum& s, int axis) {
  const TorusGrid& g = s.grid();
  Spectrum out(g);
  auto src = s.coeffs();
  auto dst = out.coeffs();
  for (int p = 0; p < g.nx(); ++p) {
    for (int q = 0; q < g.ny(); ++q) {
      const int k = axis == 0 ? g.mode_x(p) : g.mode_y(q);
      const int nyquist = axis == 0 ? -g.nx() / 2 : -g.ny() / 2;
      const std::size_t idx = g.index(p, q);
      dst[idx] = k == nyquist ? cplx(0.0) : cplx(0.0, kTwoPi * k) * src[idx];
    }
  }
  return out;
}

ScalarField partial_x(const ScalarField& f) { return inverse_transform(derivative(transform(f), 0)); }
ScalarField partial_y(const ScalarField& f) { return inverse_transform(derivative(transform(f), 1)); }

JacobianField gradient(const VectorField& u) {
  const Spectrum s1 = transform(u[0]);
  const Spectrum s2 = transform(u[1]);
  return JacobianField(inverse_transform(derivative(s1, 0)), inverse_transform(derivative(s1, 1)),
                       inverse_transform(derivative(s2, 0)), inverse_transform(derivative(s2, 1)));
}

ScalarField divergence(const VectorField& u) {
  Spectrum d = derivative(transform(u[0]), 0);
  const Spectrum dy = derivative(transform(u[1]), 1);
  for (std::size_t k = 0; k < d.coeffs().size(); ++k) d.coeffs()[k] += dy.coeffs()[k];
  return inverse_transform(d);
}

ScalarField laplacian(const ScalarField& f) {
  Spectrum s = transform(f);
  const TorusGrid& g = s.grid();
  for (int p = 0; p < g.nx(); ++p)
    for (int q = 0; q < g.ny(); ++q)
      s.coeffs()[g.index(p, q)] *= 1.0 - helmholtz_symbol(g.mode_x(p), g.mode_y(q));
  return inverse_transform(s);
}

// FourierMultiplier

FourierMultiplier FourierMultiplier::helmholtz() {
  return FourierMultiplier("helmholtz", [](int k1, int k2) { return helmholtz_symbol(k1, k2); });
}

FourierMultiplier FourierMultiplier::from_symbol(std::string name, Symbol symbol, const TorusGrid& grid) {
  if (!symbol) throw UnsupportedOperator("operator '" + name + "' has no symbol");
  if (symbol(0, 0) != 1.0)
    throw UnsupportedOperator("operator '" + name + "' must fix constants (symbol(0,0) = 1)");
  for (int p = 0; p < grid.nx(); ++p) {
    for (int q = 0; q < grid.ny(); ++q) {
      const int k1 = grid.mode_x(p);
      const int k2 = grid.mode_y(q);
      const double s = symbol(k1, k2);
      if (!std::isfinite(s) || s <= 0.0)
        throw UnsupportedOperator("operator '" + name + "' symbol is not positive at mode (" +
                                  std::to_string(k1) + "," + std::to_string(k2) + ")");
      if (s != symbol(-k1, -k2))
        throw UnsupportedOperator("operator '" + name + "' symbol is not even (not symmetric)");
    }
  }
  return FourierMultiplier(std::move(name), std::move(symbol));
}

Spectrum FourierMultiplier::apply(const Spectrum& s) const {
  Spectrum out = s;
  const TorusGrid& g = s.grid();
  for (int p = 0; p < g.nx(); ++p)
    for (int q = 0; q < g.ny(); ++q) out.coeffs()[g.index(p, q)] *= symbol_(g.mode_x(p), g.mode_y(q));
  return out;
}

Spectrum FourierMultiplier::apply_inverse(const Spectrum& s) const {
  Spectrum out = s;
  const TorusGrid& g = s.grid();
  for (int p = 0; p < g.nx(); ++p)
    for (int q = 0; q < g.ny(); ++q) out.coeffs()[g.index(p, q)] /= symbol_(g.mode_x(p), g.mode_y(q));
  return out;
}

ScalarField FourierMultiplier::apply(const ScalarField& f) const {
  return inverse_transform(apply(transform(f)));
}

ScalarField FourierMultiplier::apply_inverse(const ScalarField& f) const {
  return inverse_transform(apply_inverse(transform(f)));
}

VectorField FourierMultiplier::apply(const VectorField& u) const { return {apply(u[0]), apply(u[1])}; }

VectorField FourierMultiplier::apply_inverse(const VectorField& u) const {
  return {apply_inverse(u[0]), apply_inverse(u[1])};
}

ScalarField helmholtz(const ScalarField& f) { return FourierMultiplier::helmholtz().apply(f); }
ScalarField helmholtz_inverse(const ScalarField& f) { return FourierMultiplier::helmholtz().apply_inverse(f); }
VectorField helmholtz(const VectorField& u) { return FourierMultiplier::helmholtz().apply(u); }
VectorField helmholtz_inverse(const VectorField& m) { return FourierMultiplier::helmholtz().apply_inverse(m); }

// Inner products

namespace {

template <class Weight>
double parseval(const ScalarField& f, const ScalarField& g, Weight&& weight) {
  require_same_grid(f.grid(), g.grid());
  const Spectrum a = transform(f);
  const Spectrum b = transform(g);
  const TorusGrid& grid = f.grid();
  double sum = 0.0;
  for (int p = 0; p < grid.nx(); ++p) {
    for (int q = 0; q < grid.ny(); ++q) {
      const std::size_t k = grid.index(p, q);
      sum += weight(grid.mode_x(p), grid.mode_y(q)) * (std::conj(a.coeffs()[k]) * b.coeffs()[k]).real();
    }
  }
  return sum;
}

}  // namespace

double l2_inner(const ScalarField& f, const ScalarField& g) {
  return parseval(f, g, [](int, int) { return 1.0; });
}

double l2_inner(const VectorField& u, const VectorField& v) {
  return l2_inner(u[0], v[0]) + l2_inner(u[1], v[1]);
}

double h1_inner(const VectorField& u, const VectorField& v) {
  return parseval(u[0], v[0], helmholtz_symbol) + parseval(u[1], v[1], helmholtz_symbol);
}

// Padding

namespace {

void require_pad(int pad) {
  if (pad < 1) throw std::invalid_argument("pad factor must be >= 1, got " + std::to_string(pad));
}

}  // namespace

std::vector<double> upsample(const Spectrum& s, int pad) {
  require_pad(pad);
  const TorusGrid& g = s.grid();
  const int nx = g.nx(), ny = g.ny();
  const int fx = pad * nx, fy = pad * ny;
  std::vector<cplx> fine(static_cast<std::size_t>(fx) * fy, cplx(0.0));
  auto slot = [](int k, int n) { return k >= 0 ? k : k + n; };

  for (int p = 0; p < nx; ++p) {
    for (int q = 0; q < ny; ++q) {
      const int k1 = g.mode_x(p), k2 = g.mode_y(q);
      const cplx c = s.coeffs()[g.index(p, q)];
      // A coarse Nyquist mode is read as a cosine and split over +-n/2 on the fine grid.
      const bool split1 = pad > 1 && k1 == -nx / 2;
      const bool split2 = pad > 1 && k2 == -ny / 2;
      const double w = (split1 ? 0.5 : 1.0) * (split2 ? 0.5 : 1.0);
      for (int a = 0; a < (split1 ? 2 : 1); ++a) {
        for (int b = 0; b < (split2 ? 2 : 1); ++b) {
          const int m1 = a == 0 ? k1 : -k1;
          const int m2 = b == 0 ? k2 : -k2;
          fine[static_cast<std::size_t>(slot(m1, fx)) * fy + slot(m2, fy)] += w * c;
        }
      }
    }
  }
  detail::dft2d(fine, fx, fy, +1);
  std::vector<double> out(fine.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fine[k].real();
  return out;
}

Spectrum downsample(const TorusGrid& coarse, std::span<const double> fine_values, int pad) {
  require_pad(pad);
  const int nx = coarse.nx(), ny = coarse.ny();
  const int fx = pad * nx, fy = pad * ny;
  if (fine_values.size() != static_cast<std::size_t>(fx) * fy)
    throw std::invalid_argument("downsample: fine buffer does not match padded grid");
  std::vector<cplx> fine(fine_values.begin(), fine_values.end());
  detail::dft2d(fine, fx, fy, -1);
  const double scale = 1.0 / static_cast<double>(fine.size());
  auto slot = [](int k, int n) { return k >= 0 ? k : k + n; };

  Spectrum out(coarse);
  for (int p = 0; p < nx; ++p) {
    for (int q = 0; q < ny; ++q) {
      const int k1 = coarse.mode_x(p), k2 = coarse.mode_y(q);
      // Galerkin truncation: only the paired modes |k| < n/2 survive refinement.
      if (pad > 1 && (k1 == -nx / 2 || k2 == -ny / 2)) continue;
      out.coeffs()[coarse.index(p, q)] = fine[static_cast<std::size_t>(slot(k1, fx)) * fy + slot(k2, fy)] * scale;
    }
  }
  return out;
}

ScalarField pointwise_product(const ScalarField& f, const ScalarField& g, int pad) {
  require_same_grid(f.grid(), g.grid());
  std::vector<double> a = upsample(transform(f), pad);
  const std::vector<double> b = upsample(transform(g), pad);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  return inverse_transform(downsample(f.grid(), a, pad));
}

// Off-grid evaluation

struct OffgridEvaluator::Tables {
  Eigen::MatrixXcd ex;  // P x (nx+1): exp(2 pi i k1 x_p), k1 = -nx/2..nx/2
  Eigen::MatrixXcd ey;  // P x (ny/2+1): exp(2 pi i k2 y_p), k2 = 0..ny/2
};

namespace {

// Row of exp(2 pi i k t) for k = 0..kmax by repeated multiplication.
void fill_powers(double t, int kmax, cplx* out) {
  t -= std::floor(t);
  const cplx z = std::polar(1.0, kTwoPi * t);
  out[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) out[k] = out[k - 1] * z;
}

}  // namespace

OffgridEvaluator::OffgridEvaluator(const TorusGrid& grid, std::span<const Point> points)
    : grid_(grid), tables_(std::make_unique<Tables>()) {
  const int hx = grid.nx() / 2, hy = grid.ny() / 2;
  const auto np = static_cast<Eigen::Index>(points.size());
  tables_->ex.resize(np, 2 * hx + 1);
  tables_->ey.resize(np, hy + 1);
  std::vector<cplx> px(hx + 1), py(hy + 1);
  for (Eigen::Index p = 0; p < np; ++p) {
    fill_powers(points[p].x, hx, px.data());
    fill_powers(points[p].y, hy, py.data());
    for (int k = 0; k <= hx; ++k) {
      tables_->ex(p, hx + k) = px[k];
      tables_->ex(p, hx - k) = std::conj(px[k]);
    }
    for (int k = 0; k <= hy; ++k) tables_->ey(p, k) = py[k];
  }
}

OffgridEvaluator::~OffgridEvaluator() = default;
OffgridEvaluator::OffgridEvaluator(OffgridEvaluator&&) noexcept = default;
OffgridEvaluator& OffgridEvaluator::operator=(OffgridEvaluator&&) noexcept = default;

std::size_t OffgridEvaluator::num_points() const { return static_cast<std::size_t>(tables_->ex.rows()); }

std::vector<double> OffgridEvaluator::evaluate(const Spectrum& s) const {
  require_same_grid(grid_, s.grid());
  const int hx = grid_.nx() / 2, hy = grid_.ny() / 2;
  // Coefficients for k1 in [-hx, hx], k2 in [0, hy], Nyquist split into cosines and
  // the k2 < 0 half folded in through conjugate symmetry (weight 2).
  Eigen::MatrixXcd c(2 * hx + 1, hy + 1);
  for (int k1 = -hx; k1 <= hx; ++k1) {
    for (int k2 = 0; k2 <= hy; ++k2) {
      const int m1 = k1 == hx ? -hx : k1;
      const int m2 = k2 == hy ? -hy : k2;
      double w = k2 == 0 ? 1.0 : 2.0;
      if (k1 == hx || k1 == -hx) w *= 0.5;
      if (k2 == hy) w *= 0.5;
      c(k1 + hx, k2) = w * s.mode(m1, m2);
    }
  }
  const Eigen::MatrixXcd t = tables_->ey * c.transpose();
  const Eigen::VectorXd v = tables_->ex.cwiseProduct(t).rowwise().sum().real();
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> OffgridEvaluator::evaluate(const ScalarField& f) const { return evaluate(transform(f)); }

std::vector<double> eval_offgrid(const ScalarField& f, std::span<const Point> points) {
  return OffgridEvaluator(f.grid(), points).evaluate(f);
}

// Random inputs

namespace {

// Uniform on [-1, 1) from the top 53 bits; fixed across standard libraries.
double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

ScalarField random_component(const TorusGrid& grid, std::mt19937_64& rng, int kmax) {
  Spectrum s(grid);
  for (int k1 = 0; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 < 0) continue;
      const double re = uniform_pm1(rng);
      const double im = (k1 == 0 && k2 == 0) ? 0.0 : uniform_pm1(rng);
      const cplx c(re, im);
      s.coeffs()[grid.index(grid.slot_x(k1), grid.slot_y(k2))] = c;
      s.coeffs()[grid.index(grid.slot_x(-k1), grid.slot_y(-k2))] = std::conj(c);
    }
  }
  return inverse_transform(s);
}

}  // namespace

VectorField random_bandlimited(const TorusGrid& grid, std::uint64_t seed, int kmax, double amplitude) {
  if (kmax < 0 || 2 * kmax >= std::min(grid.nx(), grid.ny()))
    throw std::invalid_argument("kmax " + std::to_string(kmax) + " too large for a " +
                                std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()) + " grid");
  std::mt19937_64 rng(seed);
  ScalarField a = random_component(grid, rng, kmax);
  ScalarField b = random_component(grid, rng, kmax);
  const double sup = std::max(a.sup_norm(), b.sup_norm());
  if (amplitude == 0.0 || sup == 0.0) return VectorField::zero(grid);
  const double scale = amplitude / sup;
  return {scale * std::move(a), scale * std::move(b)};
}

}  // namespace torusflow
