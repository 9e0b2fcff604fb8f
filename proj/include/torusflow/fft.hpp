#pragma once

#include <complex>
#include <span>

namespace torusflow::detail {

// Unnormalized in-place complex DFTs backed by FFTW. sign = -1 is the forward
// transform exp(-2 pi i k x), sign = +1 the backward one. Plans are cached per
// shape and safe to use from several threads.
void dft2d(std::span<std::complex<double>> data, int n0, int n1, int sign);
void dft1d(std::span<std::complex<double>> data, int n, int sign);

}  // namespace torusflow::detail
