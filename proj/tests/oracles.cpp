#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

using tierforge::Frame;
using tierforge::IlluminationMap;
using tierforge::Mat;

double bilinear(const Frame& src, int out_w, int out_h, int y, int x, int c) {
    auto sample = [&](double yy, double xx) {
        yy = std::clamp(yy, 0.0, static_cast<double>(src.height - 1));
        xx = std::clamp(xx, 0.0, static_cast<double>(src.width - 1));
        const int y0 = static_cast<int>(std::floor(yy));
        const int x0 = static_cast<int>(std::floor(xx));
        const int y1 = std::min(y0 + 1, src.height - 1);
        const int x1 = std::min(x0 + 1, src.width - 1);
        const double fy = yy - y0, fx = xx - x0;
        return (1 - fy) * ((1 - fx) * src.at(y0, x0, c) + fx * src.at(y0, x1, c)) +
               fy * ((1 - fx) * src.at(y1, x0, c) + fx * src.at(y1, x1, c));
    };
    const double sy = (y + 0.5) * (static_cast<double>(src.height) / out_h) - 0.5;
    const double sx = (x + 0.5) * (static_cast<double>(src.width) / out_w) - 0.5;
    return sample(sy, sx);
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in, bool inverse) {
    const std::size_t n = in.size();
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(j * k % n) / n;
            acc += in[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

Frame blur(std::span<const Frame> frames, const tierforge::CameraResponse& crf) {
    const Frame& first = frames.front();
    Frame out(first.width, first.height, first.channels);
    for (std::size_t s = 0; s < out.data.size(); ++s) {
        double acc = 0.0;
        for (const Frame& f : frames) acc += tierforge::crf_invert(f.data[s], crf);
        out.data[s] = std::clamp(tierforge::crf_apply(acc / static_cast<double>(frames.size()), crf), 0.0, 1.0);
    }
    return out;
}

double charbonnier(const Frame& a, const Frame& b, double eps) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += std::sqrt(d * d + eps);
    }
    return acc / static_cast<double>(a.data.size());
}

double psnr(const Frame& a, const Frame& b, double peak) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Frame& a, const Frame& b) {
    constexpr int rad = 5;
    constexpr double sigma = 1.5, k1 = 0.01, k2 = 0.03;
    double kern[11][11];
    double ksum = 0.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            const double dy = i - rad, dx = j - rad;
            kern[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            ksum += kern[i][j];
        }
    for (auto& row : kern)
        for (double& v : row) v /= ksum;

    const double c1 = k1 * k1, c2 = k2 * k2;
    double result = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        double acc = 0.0;
        int count = 0;
        for (int y = rad; y < a.height - rad; ++y)
            for (int x = rad; x < a.width - rad; ++x) {
                double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
                for (int i = 0; i < 11; ++i)
                    for (int j = 0; j < 11; ++j) {
                        const double va = a.at(y + i - rad, x + j - rad, c);
                        const double vb = b.at(y + i - rad, x + j - rad, c);
                        mu_a += kern[i][j] * va;
                        mu_b += kern[i][j] * vb;
                        aa += kern[i][j] * (va * va);
                        bb += kern[i][j] * (vb * vb);
                        ab += kern[i][j] * (va * vb);
                    }
                const double var_a = aa - mu_a * mu_a;
                const double var_b = bb - mu_b * mu_b;
                const double cov = ab - mu_a * mu_b;
                acc += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                       ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                ++count;
            }
        result += acc / count;
    }
    return result / a.channels;
}

std::vector<double> screen_solve_dense(const std::vector<double>& rhs, int h, int w, double mu) {
    const int n = h * w;
    // Build A = 2I + mu * grad^T grad densely via the operator definition.
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    auto idx = [w](int y, int x) { return y * w + x; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int i = idx(y, x);
            a[static_cast<std::size_t>(i) * n + i] += 2.0;
            // grad^T grad: for each forward-difference edge touching i.
            const int xr = (x + 1) % w, yd = (y + 1) % h;
            const int jx = idx(y, xr), jy = idx(yd, x);
            // Edge (i -> jx): contributes (T_jx - T_i)^2 to ||grad T||^2.
            a[static_cast<std::size_t>(i) * n + i] += mu;
            a[static_cast<std::size_t>(jx) * n + jx] += mu;
            a[static_cast<std::size_t>(i) * n + jx] -= mu;
            a[static_cast<std::size_t>(jx) * n + i] -= mu;
            a[static_cast<std::size_t>(i) * n + i] += mu;
            a[static_cast<std::size_t>(jy) * n + jy] += mu;
            a[static_cast<std::size_t>(i) * n + jy] -= mu;
            a[static_cast<std::size_t>(jy) * n + i] -= mu;
        }

    std::vector<double> b = rhs;
    // Gaussian elimination with partial pivoting.
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
                std::abs(a[static_cast<std::size_t>(best) * n + col]))
                best = r;
        if (best != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(col) * n + c], a[static_cast<std::size_t>(best) * n + c]);
            std::swap(b[col], b[best]);
        }
        const double pivot = a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r) * n + col] / pivot;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[static_cast<std::size_t>(r) * n + c] * x[c];
        x[r] = acc / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

namespace {

void periodic_gradient(const std::vector<double>& t, int h, int w, std::vector<double>& gx,
                       std::vector<double>& gy) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            gx[static_cast<std::size_t>(y) * w + x] =
                t[static_cast<std::size_t>(y) * w + (x + 1) % w] - t[static_cast<std::size_t>(y) * w + x];
            gy[static_cast<std::size_t>(y) * w + x] =
                t[static_cast<std::size_t>((y + 1) % h) * w + x] - t[static_cast<std::size_t>(y) * w + x];
        }
}

double objective(const std::vector<double>& t, const std::vector<double>& t_hat, int h, int w,
                 double alpha, const std::vector<double>& wx, const std::vector<double>& wy) {
    std::vector<double> gx(t.size()), gy(t.size());
    periodic_gradient(t, h, w, gx, gy);
    double f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = t[i] - t_hat[i];
        f += d * d + alpha * (wx[i] * std::abs(gx[i]) + wy[i] * std::abs(gy[i]));
    }
    return f;
}

} // namespace

double subgradient_best_objective(const IlluminationMap& t_hat, double alpha,
                                  const std::vector<double>& wx, const std::vector<double>& wy,
                                  int steps, IlluminationMap* best_map) {
    const int h = t_hat.height, w = t_hat.width;
    std::vector<double> t = t_hat.data;
    std::vector<double> gx(t.size()), gy(t.size()), sg(t.size());
    double best = objective(t, t_hat.data, h, w, alpha, wx, wy);
    std::vector<double> best_t = t;

    for (int k = 1; k <= steps; ++k) {
        periodic_gradient(t, h, w, gx, gy);
        // Subgradient: 2(T - T_hat) + alpha grad^T (W o sign(grad T)).
        for (std::size_t i = 0; i < sg.size(); ++i) {
            gx[i] = wx[i] * (gx[i] > 0 ? 1.0 : (gx[i] < 0 ? -1.0 : 0.0));
            gy[i] = wy[i] * (gy[i] > 0 ? 1.0 : (gy[i] < 0 ? -1.0 : 0.0));
        }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int xl = (x + w - 1) % w, yu = (y + h - 1) % h;
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double adj = (gx[static_cast<std::size_t>(y) * w + xl] - gx[i]) +
                                   (gy[static_cast<std::size_t>(yu) * w + x] - gy[i]);
                sg[i] = 2.0 * (t[i] - t_hat.data[i]) + alpha * adj;
            }
        double norm = 0.0;
        for (double v : sg) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        const double step = 0.05 * std::sqrt(static_cast<double>(t.size())) / (std::sqrt(static_cast<double>(k)) * norm);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] -= step * sg[i];
        const double f = objective(t, t_hat.data, h, w, alpha, wx, wy);
        if (f < best) {
            best = f;
            best_t = t;
        }
    }
    if (best_map) {
        best_map->width = w;
        best_map->height = h;
        best_map->data = best_t;
    }
    return best;
}

double sigma_squared_grid_search(double raw) {
    auto f = [raw](double s) { return raw / (2.0 * s) + std::log1p(s); };
    double best_s = 1.0, best_f = f(1.0);
    for (int i = 1; i <= 200000; ++i) {
        const double s = i * 1e-4; // covers (0, 20]
        const double v = f(s);
        if (v < best_f) {
            best_f = v;
            best_s = s;
        }
    }
    // Local ternary refinement around the grid winner.
    double lo = std::max(best_s - 1e-4, 1e-9), hi = best_s + 1e-4;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2)) hi = m2;
        else lo = m1;
    }
    return 0.5 * (lo + hi);
}

Mat attention(const Mat& q, const Mat& k, const Mat& v, int heads) {
    const int d = q.cols / heads;
    Mat out(q.rows, q.cols);
    for (int hd = 0; hd < heads; ++hd)
        for (int i = 0; i < q.rows; ++i) {
            std::vector<double> logits(k.rows, 0.0);
            for (int j = 0; j < k.rows; ++j)
                for (int x = 0; x < d; ++x) logits[j] += q.at(i, hd * d + x) * k.at(j, hd * d + x);
            double denom = 0.0;
            std::vector<double> weights(k.rows);
            for (int j = 0; j < k.rows; ++j) {
                weights[j] = std::exp(logits[j] / std::sqrt(static_cast<double>(d)));
                denom += weights[j];
            }
            for (int x = 0; x < d; ++x) {
                double acc = 0.0;
                for (int j = 0; j < k.rows; ++j) acc += (weights[j] / denom) * v.at(j, hd * d + x);
                out.at(i, hd * d + x) = acc;
            }
        }
    return out;
}

double total_variation(const IlluminationMap& t) {
    std::vector<double> gx(t.size()), gy(t.size());
    periodic_gradient(t.data, t.height, t.width, gx, gy);
    double tv = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) tv += std::abs(gx[i]) + std::abs(gy[i]);
    return tv;
}

} // namespace oracle
