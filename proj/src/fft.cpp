#include "torusflow/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace torusflow::detail {
namespace {

using PlanKey = std::tuple<int, int, int>;  // n0, n1 (0 for 1D), sign

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n0, int n1, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const PlanKey key{n0, n1, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    // The planner never touches the buffer with FFTW_ESTIMATE, but it must exist.
    const std::size_t n = static_cast<std::size_t>(n0) * (n1 > 0 ? n1 : 1);
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = n1 > 0 ? fftw_plan_dft_2d(n0, n1, buf, buf, sign, flags)
                            : fftw_plan_dft_1d(n0, buf, buf, sign, flags);
    fftw_free(buf);
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(fftw_plan plan, std::span<std::complex<double>> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void dft2d(std::span<std::complex<double>> data, int n0, int n1, int sign) {
  if (data.size() != static_cast<std::size_t>(n0) * n1)
    throw std::invalid_argument("dft2d: buffer size does not match shape");
  execute(cache().get(n0, n1, sign), data);
}

void dft1d(std::span<std::complex<double>> data, int n, int sign) {
  if (data.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("dft1d: buffer size does not match length");
  execute(cache().get(n, 0, sign), data);
}

}  // namespace torusflow::detail
