#include "spectral.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>

namespace mcf::detail {
namespace {

struct Plans {
  fftw_plan forward{nullptr};
  fftw_plan backward{nullptr};
};

// Planner calls are not thread-safe in FFTW; execution with the new-array
// interface is.
std::mutex planner_mutex;

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  const std::lock_guard lock(planner_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) { return it->second; }
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> modes(static_cast<std::size_t>(n / 2 + 1));
  auto* cplx = reinterpret_cast<fftw_complex*>(modes.data());
  Plans p;
  p.forward  = fftw_plan_dft_r2c_1d(n, real.data(), cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_c2r_1d(n, cplx, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

template <class Symbol>
std::vector<double> apply(std::span<const double> values, Symbol symbol) {
  const int n      = static_cast<int>(values.size());
  const auto& plan = plans_for(n);
  std::vector<double> real(values.begin(), values.end());
  std::vector<std::complex<double>> modes(static_cast<std::size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(plan.forward, real.data(), reinterpret_cast<fftw_complex*>(modes.data()));
  const double scale = 1.0 / n;
  for (int k = 0; k <= n / 2; ++k) {
    modes[static_cast<std::size_t>(k)] *= symbol(k, 2 * k == n) * scale;
  }
  fftw_execute_dft_c2r(plan.backward, reinterpret_cast<fftw_complex*>(modes.data()), real.data());
  return real;
}

}  // namespace

std::vector<double> spectral_first_derivative(std::span<const double> values) {
  return apply(values, [](int k, bool nyquist) -> std::complex<double> {
    if (nyquist) { return 0.0; }
    return {0.0, static_cast<double>(k)};
  });
}

std::vector<double> spectral_identity_plus_second(std::span<const double> values) {
  return apply(values, [](int k, bool) -> std::complex<double> {
    return 1.0 - static_cast<double>(k) * static_cast<double>(k);
  });
}

std::vector<std::complex<double>> fourier_coefficients(std::span<const double> values) {
  const int n      = static_cast<int>(values.size());
  const auto& plan = plans_for(n);
  std::vector<double> real(values.begin(), values.end());
  std::vector<std::complex<double>> modes(static_cast<std::size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(plan.forward, real.data(), reinterpret_cast<fftw_complex*>(modes.data()));
  for (auto& c : modes) { c /= static_cast<double>(n); }
  return modes;
}

}  // namespace mcf::detail
