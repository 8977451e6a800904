#pragma once

#include <complex>
#include <vector>

namespace fracdrift::detail {

// In-place iterative radix-2 FFT; size must be a power of two.
// Forward uses e^{-2*pi*i*jk/n}; inverse divides by n.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace fracdrift::detail
