#pragma once

#include <complex>
#include <vector>

namespace vri {

// In-place iterative radix-2 FFT. Size must be a power of two.
// Forward transform is unscaled; the inverse applies the 1/N factor.
// Self-contained so seeded synthetic series are bit-reproducible.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(std::size_t n);

}  // namespace vri
