#include "tierforge/retinex.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>

#include "tierforge/fft.hpp"

namespace tierforge {

void LimeParams::validate() const {
    if (alpha <= 0.0) throw Error(Errc::bad_argument, "LimeParams: alpha must be positive");
    if (weight_eps <= 0.0) throw Error(Errc::bad_argument, "LimeParams: weight_eps must be positive");
    if (mu0 <= 0.0) throw Error(Errc::bad_argument, "LimeParams: mu0 must be positive");
    if (rho <= 1.0) throw Error(Errc::bad_argument, "LimeParams: rho must be > 1");
    if (max_iter < 1) throw Error(Errc::bad_argument, "LimeParams: max_iter must be >= 1");
    if (tol <= 0.0) throw Error(Errc::bad_argument, "LimeParams: tol must be positive");
}

double shrink(double v, double threshold) {
    const double m = std::abs(v) - threshold;
    return m > 0.0 ? std::copysign(m, v) : 0.0;
}

IlluminationMap init_illumination(const Frame& frame) {
    frame.validate();
    IlluminationMap t(frame.width, frame.height);
    const std::ptrdiff_t pixels = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        double m = frame.data[p * frame.channels];
        for (int c = 1; c < frame.channels; ++c) m = std::max(m, frame.data[p * frame.channels + c]);
        t.data[p] = std::max(m, kEpsFloor);
    }
    return t;
}

namespace {

// Forward differences with periodic wrap; gx(y,x) = T(y, x+1) - T(y, x).
void gradient(const std::vector<double>& t, int h, int w, std::vector<double>& gx, std::vector<double>& gy) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        const std::size_t row_dn = static_cast<std::size_t>((y + 1) % h) * w;
        for (int x = 0; x < w; ++x) {
            const int xr = (x + 1) % w;
            gx[row + x] = t[row + xr] - t[row + x];
            gy[row + x] = t[row_dn + x] - t[row + x];
        }
    }
}

// Adjoint of the periodic forward-difference operator (negative divergence).
void gradient_adjoint(const std::vector<double>& px, const std::vector<double>& py, int h, int w,
                      std::vector<double>& out) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        const std::size_t row_up = static_cast<std::size_t>((y + h - 1) % h) * w;
        for (int x = 0; x < w; ++x) {
            const int xl = (x + w - 1) % w;
            out[row + x] = (px[row + xl] - px[row + x]) + (py[row_up + x] - py[row + x]);
        }
    }
}

// Row-partial sums combined serially keep the result independent of the
// thread count.
double det_sum(const std::vector<double>& acc_rows) {
    double s = 0.0;
    for (double v : acc_rows) s += v;
    return s;
}

} // namespace

double lime_objective(const IlluminationMap& t, const IlluminationMap& t_hat, double alpha,
                      const std::vector<double>& wx, const std::vector<double>& wy) {
    const int h = t.height, w = t.width;
    std::vector<double> rows(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        const std::size_t row_dn = static_cast<std::size_t>((y + 1) % h) * w;
        double acc = 0.0;
        for (int x = 0; x < w; ++x) {
            const int xr = (x + 1) % w;
            const double d = t.data[row + x] - t_hat.data[row + x];
            acc += d * d;
            acc += alpha * wx[row + x] * std::abs(t.data[row + xr] - t.data[row + x]);
            acc += alpha * wy[row + x] * std::abs(t.data[row_dn + x] - t.data[row + x]);
        }
        rows[y] = acc;
    }
    return det_sum(rows);
}

void make_weights(const IlluminationMap& t_hat, const LimeParams& params,
                  std::vector<double>& wx, std::vector<double>& wy) {
    const std::size_t n = t_hat.size();
    wx.assign(n, 1.0);
    wy.assign(n, 1.0);
    if (params.weight_strategy == WeightStrategy::uniform) return;

    std::vector<double> gx(n), gy(n);
    gradient(t_hat.data, t_hat.height, t_hat.width, gx, gy);
    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        wx[i] = 1.0 / (std::abs(gx[i]) + params.weight_eps);
        wy[i] = 1.0 / (std::abs(gy[i]) + params.weight_eps);
    }
}

LimeResult refine_illumination_alm(const IlluminationMap& t_hat, const LimeParams& params) {
    params.validate();
    const int h = t_hat.height, w = t_hat.width;
    if (h < 1 || w < 1 || t_hat.data.size() != static_cast<std::size_t>(h) * w)
        throw Error(Errc::bad_argument, "refine_illumination_alm: invalid map");
    const std::size_t n = t_hat.size();

    std::vector<double> wx, wy;
    make_weights(t_hat, params, wx, wy);

    // Eigenvalues of grad^T grad under the periodic boundary.
    std::vector<double> lam(n);
    for (int y = 0; y < h; ++y) {
        const double ly = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * y / h);
        for (int x = 0; x < w; ++x) {
            const double lx = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * x / w);
            lam[static_cast<std::size_t>(y) * w + x] = ly + lx;
        }
    }

    IlluminationMap t = t_hat;
    std::vector<double> gx(n), gy(n), big_gx(n), big_gy(n), lx(n, 0.0), ly(n, 0.0), adj(n);
    gradient(t.data, h, w, gx, gy);
    big_gx = gx;
    big_gy = gy;

    double mu = params.mu0;
    LimeResult result;
    result.trace.reserve(params.max_iter);

    IlluminationMap best = t;
    double best_obj = lime_objective(t, t_hat, params.alpha, wx, wy);
    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
    std::vector<std::complex<double>> freq(n);

    for (int it = 0; it < params.max_iter; ++it) {
        // T-update: (2I + mu grad^T grad) T = 2 T_hat + grad^T (mu G - Lambda)
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < sn; ++i) {
            big_gx[i] = mu * big_gx[i] - lx[i];
            big_gy[i] = mu * big_gy[i] - ly[i];
        }
        gradient_adjoint(big_gx, big_gy, h, w, adj);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < sn; ++i) freq[i] = 2.0 * t_hat.data[i] + adj[i];
        fft_2d(freq, h, w, false);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < sn; ++i) freq[i] /= (2.0 + mu * lam[i]);
        fft_2d(freq, h, w, true);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < sn; ++i) t.data[i] = freq[i].real();

        // G-update: soft shrinkage of grad T + Lambda / mu.
        gradient(t.data, h, w, gx, gy);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < sn; ++i) {
            big_gx[i] = shrink(gx[i] + lx[i] / mu, params.alpha * wx[i] / mu);
            big_gy[i] = shrink(gy[i] + ly[i] / mu, params.alpha * wy[i] / mu);
        }

        // Multiplier update and residual.
        std::vector<double> row_max(h, 0.0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * w;
            double m = 0.0;
            for (int x = 0; x < w; ++x) {
                const double rx = gx[row + x] - big_gx[row + x];
                const double ry = gy[row + x] - big_gy[row + x];
                lx[row + x] += mu * rx;
                ly[row + x] += mu * ry;
                m = std::max(m, std::max(std::abs(rx), std::abs(ry)));
            }
            row_max[y] = m;
        }
        double residual = 0.0;
        for (double m : row_max) residual = std::max(residual, m);

        const double obj = lime_objective(t, t_hat, params.alpha, wx, wy);
        if (obj < best_obj) {
            best_obj = obj;
            best = t;
        }
        result.trace.push_back({it, best_obj, obj, residual, mu});
        mu *= params.rho;

        if (residual < params.tol) {
            result.converged = true;
            break;
        }
    }

    result.refined = std::move(best);
    for (double& v : result.refined.data) v = std::max(v, kEpsFloor);
    return result;
}

RetinexDecomposition decompose(const Frame& frame, const IlluminationMap& t) {
    frame.validate();
    if (t.width != frame.width || t.height != frame.height)
        throw Error(Errc::dimension_mismatch, "decompose: illumination size mismatch");
    for (double v : t.data)
        if (!(v > 0.0)) throw Error(Errc::bad_argument, "decompose: illumination must be strictly positive");

    RetinexDecomposition d;
    d.illumination = t;
    d.reflectance = Frame(frame.width, frame.height, frame.channels);
    const std::ptrdiff_t pixels = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p)
        for (int c = 0; c < frame.channels; ++c)
            d.reflectance.data[p * frame.channels + c] = frame.data[p * frame.channels + c] / t.data[p];
    return d;
}

namespace {

Frame degrade_impl(const RetinexDecomposition& decomp, const GammaParams& g, bool clamped) {
    g.validate();
    const Frame& r = decomp.reflectance;
    const IlluminationMap& t = decomp.illumination;
    if (r.width != t.width || r.height != t.height)
        throw Error(Errc::dimension_mismatch, "degrade: decomposition size mismatch");

    Frame out(r.width, r.height, r.channels);
    const std::ptrdiff_t pixels = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        const double h_hat = std::pow(t.data[p], g.gamma1);
        for (int c = 0; c < r.channels; ++c) {
            const double rv = r.data[p * r.channels + c];
            if (clamped) {
                const double r_hat = std::pow(std::clamp(rv, 0.0, 1.0), g.gamma2);
                out.data[p * r.channels + c] = std::clamp(r_hat * h_hat, 0.0, 1.0);
            } else {
                out.data[p * r.channels + c] = std::pow(rv, g.gamma2) * h_hat;
            }
        }
    }
    return out;
}

} // namespace

Frame degrade(const RetinexDecomposition& decomp, const GammaParams& g) {
    return degrade_impl(decomp, g, true);
}

Frame degrade_unclamped(const RetinexDecomposition& decomp, const GammaParams& g) {
    return degrade_impl(decomp, g, false);
}

Frame invert_gamma(const Frame& degraded, const RetinexDecomposition& decomp, const GammaParams& g) {
    if (g.gamma1 == 0.0 || g.gamma2 == 0.0)
        throw Error(Errc::bad_argument, "invert_gamma: exponents must be nonzero");
    const IlluminationMap& t = decomp.illumination;
    if (degraded.width != t.width || degraded.height != t.height)
        throw Error(Errc::dimension_mismatch, "invert_gamma: size mismatch");

    Frame out(degraded.width, degraded.height, degraded.channels);
    const std::ptrdiff_t pixels = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        const double h_hat = std::pow(t.data[p], g.gamma1);
        const double h = std::pow(h_hat, 1.0 / g.gamma1);
        for (int c = 0; c < degraded.channels; ++c) {
            const double r_hat = degraded.data[p * degraded.channels + c] / h_hat;
            out.data[p * degraded.channels + c] = std::pow(r_hat, 1.0 / g.gamma2) * h;
        }
    }
    return out;
}

void write_trace_csv(const std::vector<LimeIterStat>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_failure, "write_trace_csv: cannot open: " + path);
    out << "iteration,objective,residual,mu\n";
    out.precision(17);
    for (const LimeIterStat& s : trace)
        out << s.iteration << ',' << s.objective << ',' << s.residual << ',' << s.mu << '\n';
    if (!out) throw Error(Errc::io_failure, "write_trace_csv: write failed: " + path);
}

} // namespace tierforge
