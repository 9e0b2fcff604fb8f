#include "torusflow/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "torusflow/fft.hpp"

namespace torusflow {

using cplx = std::complex<double>;

LineField::LineField(int n) : LineField(std::vector<double>(n > 0 ? n : 0, 0.0)) {}

LineField::LineField(std::vector<double> values) : v_(std::move(values)) {
  if (v_.size() < 4 || v_.size() % 2 != 0)
    throw std::invalid_argument("line field length must be even and >= 4, got " +
                                std::to_string(v_.size()));
}

double LineField::sup_norm() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

LineField& LineField::operator+=(const LineField& o) {
  if (o.size() != size()) throw std::invalid_argument("line field length mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

LineField& LineField::operator-=(const LineField& o) {
  if (o.size() != size()) throw std::invalid_argument("line field length mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

LineField& LineField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

LineField operator+(LineField a, const LineField& b) { return a += b; }
LineField operator-(LineField a, const LineField& b) { return a -= b; }
LineField operator*(double s, LineField a) { return a *= s; }

namespace {

int mode(int p, int n) { return p < n / 2 ? p : p - n; }

std::vector<cplx> analyze(const LineField& f) {
  std::vector<cplx> c(f.values().begin(), f.values().end());
  detail::dft1d(c, f.size(), -1);
  for (cplx& x : c) x /= static_cast<double>(f.size());
  return c;
}

LineField synthesize(std::vector<cplx> c) {
  const int n = static_cast<int>(c.size());
  detail::dft1d(c, n, +1);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = c[i].real();
  return LineField(std::move(v));
}

template <class Symbol>
LineField apply_symbol(const LineField& f, Symbol&& symbol) {
  std::vector<cplx> c = analyze(f);
  const int n = f.size();
  for (int p = 0; p < n; ++p) c[p] *= symbol(mode(p, n), n);
  return synthesize(std::move(c));
}

std::vector<double> upsample_line(const LineField& f, int pad) {
  const int n = f.size(), fine = pad * n;
  const std::vector<cplx> c = analyze(f);
  std::vector<cplx> out(fine, cplx(0.0));
  for (int p = 0; p < n; ++p) {
    const int k = mode(p, n);
    if (pad > 1 && k == -n / 2) {
      out[fine - n / 2] += 0.5 * c[p];
      out[n / 2] += 0.5 * c[p];
    } else {
      out[k >= 0 ? k : k + fine] += c[p];
    }
  }
  detail::dft1d(out, fine, +1);
  std::vector<double> v(fine);
  for (int i = 0; i < fine; ++i) v[i] = out[i].real();
  return v;
}

LineField downsample_line(const std::vector<double>& fine_values, int n, int pad) {
  const int fine = pad * n;
  std::vector<cplx> c(fine_values.begin(), fine_values.end());
  detail::dft1d(c, fine, -1);
  std::vector<cplx> out(n);
  for (int p = 0; p < n; ++p) {
    const int k = mode(p, n);
    // Galerkin truncation to the paired modes |k| < n/2.
    out[p] = (pad > 1 && k == -n / 2) ? cplx(0.0) : c[k >= 0 ? k : k + fine] / static_cast<double>(fine);
  }
  return synthesize(std::move(out));
}

}  // namespace

LineField line_derivative(const LineField& f) {
  return apply_symbol(f, [](int k, int n) { return k == -n / 2 ? cplx(0.0) : cplx(0.0, kTwoPi * k); });
}

LineField line_helmholtz(const LineField& f) {
  return apply_symbol(f, [](int k, int) { return cplx(helmholtz_symbol(k, 0)); });
}

LineField line_helmholtz_inverse(const LineField& f) {
  return apply_symbol(f, [](int k, int) { return cplx(1.0 / helmholtz_symbol(k, 0)); });
}

LineField line_product(const LineField& f, const LineField& g, int pad) {
  if (f.size() != g.size()) throw std::invalid_argument("line field length mismatch");
  if (pad < 1) throw std::invalid_argument("pad factor must be >= 1");
  std::vector<double> a = upsample_line(f, pad);
  const std::vector<double> b = upsample_line(g, pad);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return downsample_line(a, f.size(), pad);
}

LineField rhs_1d_b(const LineField& u, double b, int pad) {
  const LineField m = line_helmholtz(u);
  LineField mt = line_product(line_derivative(m), u, pad);
  mt += b * line_product(line_derivative(u), m, pad);
  return -1.0 * line_helmholtz_inverse(mt);
}

LineField integrate_1d_b(const LineField& u0, double b, double dt, double t_end, int pad) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  LineField u = u0;
  for (long s = 0; s < steps; ++s) {
    const LineField k1 = rhs_1d_b(u, b, pad);
    const LineField k2 = rhs_1d_b(u + (0.5 * dt) * k1, b, pad);
    const LineField k3 = rhs_1d_b(u + (0.5 * dt) * k2, b, pad);
    const LineField k4 = rhs_1d_b(u + dt * k3, b, pad);
    LineField incr = k1 + k4;
    incr += 2.0 * (k2 + k3);
    u += (dt / 6.0) * incr;
  }
  return u;
}

std::pair<LineField, LineField> mch2_rhs(const LineField& v, const LineField& rho, int pad) {
  if (v.size() != rho.size()) throw std::invalid_argument("line field length mismatch");
  const LineField q = line_helmholtz(v);
  const LineField vx = line_derivative(v);
  LineField qt = line_product(v, line_derivative(q), pad);
  qt += 2.0 * line_product(q, vx, pad);
  qt += line_product(rho, line_derivative(line_helmholtz_inverse(rho)), pad);
  LineField rhot = line_derivative(line_product(rho, v, pad));
  return {-1.0 * qt, -1.0 * rhot};
}

VectorField embed_y_independent(const TorusGrid& grid, const LineField& a, const LineField& b) {
  if (a.size() != grid.nx() || b.size() != grid.nx())
    throw std::invalid_argument("profile length must equal grid nx");
  std::vector<double> va(grid.size()), vb(grid.size());
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      va[grid.index(i, j)] = a[i];
      vb[grid.index(i, j)] = b[i];
    }
  }
  return {ScalarField(grid, std::move(va)), ScalarField(grid, std::move(vb))};
}

LineField x_profile(const ScalarField& f, int row) {
  const TorusGrid& g = f.grid();
  std::vector<double> v(g.nx());
  for (int i = 0; i < g.nx(); ++i) v[i] = f(i, row);
  return LineField(std::move(v));
}

}  // namespace torusflow
