#include "tierforge/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "tierforge/errors.hpp"

namespace tierforge {

namespace {

using cd = std::complex<double>;

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative Cooley-Tukey, n a power of two.
void fft_pow2(cd* a, std::size_t n, bool inverse) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein chirp-z transform for arbitrary n. Chirp phases use k^2 mod 2n to
// keep the angle argument small.
void fft_bluestein(cd* a, std::size_t n, bool inverse) {
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = (inverse ? 1.0 : -1.0) * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> x(m, cd(0.0, 0.0)), y(m, cd(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
    fft_pow2(x.data(), m, false);
    fft_pow2(y.data(), m, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x.data(), m, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * scale * chirp[k];
}

void fft_any(cd* a, std::size_t n, bool inverse) {
    if (n <= 1) return;
    if (is_pow2(n))
        fft_pow2(a, n, inverse);
    else
        fft_bluestein(a, n, inverse);
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) a[k] *= scale;
    }
}

void fft_2d_impl(std::vector<cd>& a, int height, int width, bool inverse, bool parallel) {
    if (height < 1 || width < 1 || a.size() != static_cast<std::size_t>(height) * width)
        throw Error(Errc::bad_argument, "fft_2d: size mismatch");

#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < height; ++y) fft_any(a.data() + static_cast<std::size_t>(y) * width, width, inverse);

#pragma omp parallel for schedule(static) if (parallel)
    for (int x = 0; x < width; ++x) {
        std::vector<cd> col(height);
        for (int y = 0; y < height; ++y) col[y] = a[static_cast<std::size_t>(y) * width + x];
        fft_any(col.data(), height, inverse);
        for (int y = 0; y < height; ++y) a[static_cast<std::size_t>(y) * width + x] = col[y];
    }
}

} // namespace

void fft(std::vector<cd>& a, bool inverse) { fft_any(a.data(), a.size(), inverse); }

void fft_2d(std::vector<cd>& a, int height, int width, bool inverse) {
    fft_2d_impl(a, height, width, inverse, true);
}

void fft_2d_serial(std::vector<cd>& a, int height, int width, bool inverse) {
    fft_2d_impl(a, height, width, inverse, false);
}

} // namespace tierforge
