#include "fft1d.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace dw::detail {

namespace {

fftw_plan plan_for(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  auto* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  plans.emplace(std::make_pair(n, sign), p);
  return p;
}

}  // namespace

void fft1d(std::vector<cplx>& data, int sign) {
  const int n = static_cast<int>(data.size());
  auto* d = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(n, sign), d, d);
}

std::vector<double> fft_wavenumbers(int n, double h) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / (n * h);
  for (int m = 0; m < n; ++m) k[m] = (m < n / 2 ? m : m - n) * dk;
  return k;
}

}  // namespace dw::detail
