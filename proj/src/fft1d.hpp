#pragma once
// Internal 1D complex FFT on contiguous vectors (unnormalized).

#include <vector>

#include "dw/clifford.hpp"

namespace dw::detail {

/// out_m = sum_l in_l exp(sign 2 pi i l m / n), in place.  sign = -1 or +1.
void fft1d(std::vector<cplx>& data, int sign);

/// Wave numbers 2 pi m / (n h) in FFT order (m = 0..n/2-1, -n/2..-1).
std::vector<double> fft_wavenumbers(int n, double h);

}  // namespace dw::detail
