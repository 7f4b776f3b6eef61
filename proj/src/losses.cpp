#include "tierforge/losses.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace tierforge {

namespace {

void require_same_shape(const Frame& a, const Frame& b, const char* who) {
    if (!a.same_shape(b)) throw Error(Errc::dimension_mismatch, std::string(who) + ": frame shapes differ");
}

// Per-row partials summed serially; bit-identical for any thread count.
template <typename RowFn>
double reduce_rows(int rows, bool parallel, RowFn&& fn) {
    std::vector<double> partial(rows, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < rows; ++y) partial[y] = fn(y);
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

double charbonnier_impl(const Frame& a, const Frame& b, double eps, CharbonnierMode mode, bool parallel) {
    require_same_shape(a, b, "charbonnier");
    const std::size_t row_samples = static_cast<std::size_t>(a.width) * a.channels;
    if (mode == CharbonnierMode::global_norm) {
        const double sq = reduce_rows(a.height, parallel, [&](int y) {
            const double* pa = a.data.data() + y * row_samples;
            const double* pb = b.data.data() + y * row_samples;
            double acc = 0.0;
            for (std::size_t i = 0; i < row_samples; ++i) {
                const double d = pa[i] - pb[i];
                acc += d * d;
            }
            return acc;
        });
        return std::sqrt(sq + eps);
    }
    const double total = reduce_rows(a.height, parallel, [&](int y) {
        const double* pa = a.data.data() + y * row_samples;
        const double* pb = b.data.data() + y * row_samples;
        double acc = 0.0;
        for (std::size_t i = 0; i < row_samples; ++i) {
            const double d = pa[i] - pb[i];
            acc += std::sqrt(d * d + eps);
        }
        return acc;
    });
    return total / static_cast<double>(a.data.size());
}

double psnr_impl(const Frame& a, const Frame& b, double peak, bool parallel) {
    require_same_shape(a, b, "psnr");
    const std::size_t row_samples = static_cast<std::size_t>(a.width) * a.channels;
    const double sq = reduce_rows(a.height, parallel, [&](int y) {
        const double* pa = a.data.data() + y * row_samples;
        const double* pb = b.data.data() + y * row_samples;
        double acc = 0.0;
        for (std::size_t i = 0; i < row_samples; ++i) {
            const double d = pa[i] - pb[i];
            acc += d * d;
        }
        return acc;
    });
    const double mse = sq / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

constexpr int kSsimRadius = 5; // 11x11 window
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

std::array<double, 11> ssim_kernel() {
    std::array<double, 11> k{};
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double d = i - kSsimRadius;
        k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable Gaussian-weighted local sums over valid centers.
double ssim_plane(const std::vector<double>& pa, const std::vector<double>& pb, int w, int h, bool parallel) {
    const auto kern = ssim_kernel();
    const int out_w = w - 2 * kSsimRadius;
    const int out_h = h - 2 * kSsimRadius;

    // Horizontal pass for the five statistics.
    const int hw = out_w; // horizontally filtered width
    std::vector<double> fa(static_cast<std::size_t>(h) * hw), fb(fa.size()), faa(fa.size()), fbb(fa.size()),
        fab(fa.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < hw; ++x) {
            double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int i = 0; i < 11; ++i) {
                const double va = pa[static_cast<std::size_t>(y) * w + x + i];
                const double vb = pb[static_cast<std::size_t>(y) * w + x + i];
                sa += kern[i] * va;
                sb += kern[i] * vb;
                saa += kern[i] * (va * va);
                sbb += kern[i] * (vb * vb);
                sab += kern[i] * (va * vb); // product first: argument order must not matter
            }
            const std::size_t o = static_cast<std::size_t>(y) * hw + x;
            fa[o] = sa;
            fb[o] = sb;
            faa[o] = saa;
            fbb[o] = sbb;
            fab[o] = sab;
        }
    }

    constexpr double c1 = kSsimK1 * kSsimK1;
    constexpr double c2 = kSsimK2 * kSsimK2;
    std::vector<double> row_sum(out_h, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < out_h; ++y) {
        double acc = 0.0;
        for (int x = 0; x < out_w; ++x) {
            double mu_a = 0.0, mu_b = 0.0, raw_aa = 0.0, raw_bb = 0.0, raw_ab = 0.0;
            for (int i = 0; i < 11; ++i) {
                const std::size_t o = static_cast<std::size_t>(y + i) * hw + x;
                mu_a += kern[i] * fa[o];
                mu_b += kern[i] * fb[o];
                raw_aa += kern[i] * faa[o];
                raw_bb += kern[i] * fbb[o];
                raw_ab += kern[i] * fab[o];
            }
            const double var_a = raw_aa - mu_a * mu_a;
            const double var_b = raw_bb - mu_b * mu_b;
            const double cov = raw_ab - mu_a * mu_b;
            acc += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                   ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
        row_sum[y] = acc;
    }
    double total = 0.0;
    for (double v : row_sum) total += v;
    return total / (static_cast<double>(out_w) * out_h);
}

double ssim_impl(const Frame& a, const Frame& b, bool parallel) {
    require_same_shape(a, b, "ssim");
    if (a.width < 11 || a.height < 11)
        throw Error(Errc::bad_argument, "ssim: frames must be at least 11x11");

    double acc = 0.0;
    std::vector<double> pa(static_cast<std::size_t>(a.width) * a.height), pb(pa.size());
    for (int c = 0; c < a.channels; ++c) {
        for (std::size_t p = 0; p < pa.size(); ++p) {
            pa[p] = a.data[p * a.channels + c];
            pb[p] = b.data[p * b.channels + c];
        }
        acc += ssim_plane(pa, pb, a.width, a.height, parallel);
    }
    return acc / a.channels;
}

} // namespace

double charbonnier(const Frame& a, const Frame& b, double eps, CharbonnierMode mode) {
    return charbonnier_impl(a, b, eps, mode, true);
}
double charbonnier_serial(const Frame& a, const Frame& b, double eps, CharbonnierMode mode) {
    return charbonnier_impl(a, b, eps, mode, false);
}

double psnr(const Frame& a, const Frame& b, double peak) { return psnr_impl(a, b, peak, true); }
double psnr_serial(const Frame& a, const Frame& b, double peak) { return psnr_impl(a, b, peak, false); }

double ssim(const Frame& a, const Frame& b) { return ssim_impl(a, b, true); }
double ssim_serial(const Frame& a, const Frame& b) { return ssim_impl(a, b, false); }

std::array<double, 3> SigmaState::sigmas() const {
    return {std::exp(log_sigma[0]), std::exp(log_sigma[1]), std::exp(log_sigma[2])};
}

LossBreakdown adaptive_weighted_loss(const std::array<double, 3>& raw, const SigmaState& state) {
    LossBreakdown out;
    out.raw = raw;
    const auto sig = state.sigmas();
    for (int i = 0; i < 3; ++i) {
        if (raw[i] < 0.0) throw Error(Errc::bad_argument, "adaptive_weighted_loss: raw loss must be >= 0");
        if (!(sig[i] > 0.0)) throw Error(Errc::bad_argument, "adaptive_weighted_loss: sigma must be positive");
        const double s2 = sig[i] * sig[i];
        out.weighted[i] = raw[i] / (2.0 * s2) + std::log1p(s2);
        out.total += out.weighted[i];
    }
    return out;
}

double reference_nll_weighted(double raw, double sigma) {
    if (!(sigma > 0.0)) throw Error(Errc::bad_argument, "reference_nll_weighted: sigma must be positive");
    return raw / (2.0 * sigma * sigma) + std::log(sigma);
}

double sigma_gradient(double raw, double sigma) {
    if (!(sigma > 0.0)) throw Error(Errc::bad_argument, "sigma_gradient: sigma must be positive");
    return -raw / (sigma * sigma * sigma) + 2.0 * sigma / (1.0 + sigma * sigma);
}

SigmaState update_sigmas(SigmaState state, const std::array<double, 3>& raw) {
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    for (int i = 0; i < 3; ++i) {
        const double sigma = std::exp(state.log_sigma[i]);
        const double g = sigma_gradient(raw[i], sigma) * sigma; // chain rule to s = log sigma
        state.adam_m[i] = state.beta1 * state.adam_m[i] + (1.0 - state.beta1) * g;
        state.adam_v[i] = state.beta2 * state.adam_v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.adam_m[i] / (1.0 - std::pow(state.beta1, t));
        const double v_hat = state.adam_v[i] / (1.0 - std::pow(state.beta2, t));
        state.log_sigma[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.adam_eps);
    }
    return state;
}

} // namespace tierforge
