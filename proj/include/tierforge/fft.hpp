#pragma once

#include <complex>
#include <vector>

namespace tierforge {

// In-place complex DFT, any length >= 1. Forward is unnormalized; inverse
// applies the 1/n factor. Radix-2 for powers of two, Bluestein otherwise.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Row-major 2-D transform: rows then columns. Rows/columns are independent,
// so the parallel and serial paths produce identical bits.
void fft_2d(std::vector<std::complex<double>>& a, int height, int width, bool inverse);
void fft_2d_serial(std::vector<std::complex<double>>& a, int height, int width, bool inverse);

} // namespace tierforge
