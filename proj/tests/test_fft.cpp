#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tierforge/fft.hpp"

using namespace tierforge;
using cd = std::complex<double>;

namespace {

std::vector<cd> random_signal(std::size_t n, std::uint64_t seed) {
    std::vector<cd> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = cd(rng::uniform_range(seed, 2 * i, -1.0, 1.0), rng::uniform_range(seed, 2 * i + 1, -1.0, 1.0));
    return v;
}

double max_err(const std::vector<cd>& a, const std::vector<cd>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_SUITE("fft") {

TEST_CASE("matches the direct DFT for assorted lengths") {
    for (std::size_t n : {1u, 2u, 3u, 5u, 6u, 7u, 8u, 12u, 15u, 16u, 17u, 31u, 32u, 100u}) {
        std::vector<cd> x = random_signal(n, 40 + n);
        std::vector<cd> got = x;
        fft(got, false);
        CHECK(max_err(got, oracle::dft(x, false)) < 1e-9);

        std::vector<cd> inv = got;
        fft(inv, true);
        CHECK(max_err(inv, x) < 1e-10);
    }
}

TEST_CASE("2-D round trip and separability") {
    for (auto [h, w] : {std::pair{4, 4}, {3, 5}, {7, 2}, {6, 12}, {1, 9}}) {
        std::vector<cd> x = random_signal(static_cast<std::size_t>(h) * w, 77 + h * w);
        std::vector<cd> f = x;
        fft_2d(f, h, w, false);
        std::vector<cd> back = f;
        fft_2d(back, h, w, true);
        CHECK(max_err(back, x) < 1e-10);

        // Row-then-column application of the 1-D oracle.
        std::vector<cd> ref = x;
        for (int y = 0; y < h; ++y) {
            std::vector<cd> row(ref.begin() + static_cast<std::ptrdiff_t>(y) * w,
                                ref.begin() + static_cast<std::ptrdiff_t>(y + 1) * w);
            row = oracle::dft(row, false);
            std::copy(row.begin(), row.end(), ref.begin() + static_cast<std::ptrdiff_t>(y) * w);
        }
        for (int x2 = 0; x2 < w; ++x2) {
            std::vector<cd> col(h);
            for (int y = 0; y < h; ++y) col[y] = ref[static_cast<std::size_t>(y) * w + x2];
            col = oracle::dft(col, false);
            for (int y = 0; y < h; ++y) ref[static_cast<std::size_t>(y) * w + x2] = col[y];
        }
        CHECK(max_err(f, ref) < 1e-9);
    }
}

TEST_CASE("large prime lengths round trip") {
    std::vector<cd> v = random_signal(9973, 3);
    std::vector<cd> w = v;
    fft(w, false);
    fft(w, true);
    CHECK(max_err(w, v) < 1e-9);
}

TEST_CASE("parallel 2-D path equals the serial reference") {
    std::vector<cd> x = random_signal(48 * 36, 123);
    std::vector<cd> a = x, b = x;
    fft_2d(a, 48, 36, false);
    fft_2d_serial(b, 48, 36, false);
    CHECK(a == b);
}

} // TEST_SUITE
