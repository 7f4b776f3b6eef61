#pragma once

#include <array>
#include <cstdint>

#include "tierforge/frame.hpp"

namespace tierforge {

enum class CharbonnierMode {
    per_pixel_mean, // mean_p sqrt((a_p - b_p)^2 + eps)
    global_norm,    // sqrt(||a - b||^2 + eps), the literal one-root form
};

double charbonnier(const Frame& a, const Frame& b, double eps = 1e-9,
                   CharbonnierMode mode = CharbonnierMode::per_pixel_mean);
double charbonnier_serial(const Frame& a, const Frame& b, double eps = 1e-9,
                          CharbonnierMode mode = CharbonnierMode::per_pixel_mean);

// 10 log10(peak^2 / MSE); identical frames report +infinity.
double psnr(const Frame& a, const Frame& b, double peak = 1.0);
double psnr_serial(const Frame& a, const Frame& b, double peak = 1.0);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, K1 = 0.01, K2 = 0.03,
// peak 1; valid window centers only, channels averaged.
double ssim(const Frame& a, const Frame& b);
double ssim_serial(const Frame& a, const Frame& b);

// Observation-noise weights for the three tier losses, optimized on
// s = log(sigma) so positivity is structural. Adam moments live on s.
struct SigmaState {
    std::array<double, 3> log_sigma{0.0, 0.0, 0.0}; // sigma_i = 1 initially
    std::array<double, 3> adam_m{0.0, 0.0, 0.0};
    std::array<double, 3> adam_v{0.0, 0.0, 0.0};
    std::int64_t step_count = 0;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double adam_eps = 1e-3;

    std::array<double, 3> sigmas() const;
};

struct LossBreakdown {
    std::array<double, 3> raw{};
    std::array<double, 3> weighted{}; // raw_i / (2 sigma_i^2) + log(1 + sigma_i^2)
    double total = 0.0;
};

LossBreakdown adaptive_weighted_loss(const std::array<double, 3>& raw, const SigmaState& state);

// Reference-only strict likelihood form raw / (2 sigma^2) + log(sigma); no
// optimizer path uses it.
double reference_nll_weighted(double raw, double sigma);

// d/dsigma of the stabilized weighted loss: -raw / sigma^3 + 2 sigma / (1 + sigma^2).
double sigma_gradient(double raw, double sigma);

// One Adam step per sigma on the log parameterization.
SigmaState update_sigmas(SigmaState state, const std::array<double, 3>& raw);

} // namespace tierforge
