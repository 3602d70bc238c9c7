#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mcf::detail {

// FFT differentiation of uniformly sampled periodic data on [0, 2π).
std::vector<double> spectral_first_derivative(std::span<const double> values);
std::vector<double> spectral_identity_plus_second(std::span<const double> values);

// c_k, k = 0..N/2, with values[j] = Re Σ w_k c_k e^{ikθ_j}, w_k = 2 except at
// k = 0 and the Nyquist mode.
std::vector<std::complex<double>> fourier_coefficients(std::span<const double> values);

}  // namespace mcf::detail
