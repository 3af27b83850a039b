#include "nlslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace nlslab::fft {

namespace {

// FFTW plans are created once per (d, n, direction) and reused through the
// new-array execute interface, which is thread safe.
class PlanCache {
 public:
  fftw_plan get(int d, int n, int sign) {
    std::lock_guard lock(mu_);
    auto key = std::make_tuple(d, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t total = d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    auto* buf = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = d == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                         : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw: plan creation failed");
    plans_.emplace(key, p);
    return p;
  }
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(int d, int n, std::vector<cplx>& data, int sign) {
  if (d != 1 && d != 2) throw std::invalid_argument("fft: d must be 1 or 2");
  const std::size_t total = d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  if (data.size() != total) throw std::invalid_argument("fft: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(d, n, sign), p, p);
}

}  // namespace

void forward(int d, int n, std::vector<cplx>& data) { run(d, n, data, FFTW_FORWARD); }

void inverse(int d, int n, std::vector<cplx>& data) {
  run(d, n, data, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= s;
}

std::vector<double> wavenumbers(int n, double box) {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double base = 2 * std::numbers::pi / box;
  for (int m = 0; m < n; ++m) k[static_cast<std::size_t>(m)] = base * (m < n / 2 ? m : m - n);
  return k;
}

}  // namespace nlslab::fft
