#pragma once

#include <string>
#include <vector>

#include "tierforge/frame.hpp"

namespace tierforge {

// Strictly positive per-pixel illumination field (the Retinex H component).
struct IlluminationMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    IlluminationMap() = default;
    IlluminationMap(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

// Division floor keeping illumination away from zero.
inline constexpr double kEpsFloor = 1e-3;

enum class WeightStrategy { uniform, gradient_inverse };

struct LimeParams {
    double alpha = 0.15;
    WeightStrategy weight_strategy = WeightStrategy::uniform;
    double weight_eps = 0.1;
    double mu0 = 0.05;
    double rho = 1.3; // faster growth stalls the dual before the optimum
    int max_iter = 200;
    double tol = 1e-5;

    void validate() const;
};

struct LimeIterStat {
    int iteration = 0;
    double objective = 0.0; // objective of the incumbent (best-so-far) iterate
    double iterate_objective = 0.0;
    double residual = 0.0;  // ||grad T - G||_inf
    double mu = 0.0;
};

struct LimeResult {
    IlluminationMap refined;
    std::vector<LimeIterStat> trace;
    bool converged = false;
};

struct RetinexDecomposition {
    Frame reflectance;       // R = I / H per channel, >= 0, may exceed 1
    IlluminationMap illumination;
};

struct GammaParams {
    double gamma1 = 2.5; // illumination exponent, > 1 darkens, 1 is identity
    double gamma2 = 1.1; // reflectance exponent, >= 1 attenuates

    void validate() const {
        if (gamma1 < 1.0) throw Error(Errc::bad_argument, "GammaParams: gamma1 must be >= 1");
        if (gamma2 < 1.0) throw Error(Errc::bad_argument, "GammaParams: gamma2 must be >= 1");
    }
};

// Soft-threshold: sign(v) * max(|v| - threshold, 0).
double shrink(double v, double threshold);

// Max-channel initial estimate floored at kEpsFloor. Single-channel frames use
// the channel directly.
IlluminationMap init_illumination(const Frame& frame);

// Per-direction weights for the smoothness term; gradient_inverse uses
// 1 / (|forward difference of t_hat| + weight_eps) with periodic wrap.
void make_weights(const IlluminationMap& t_hat, const LimeParams& params,
                  std::vector<double>& wx, std::vector<double>& wy);

// Minimizes ||T - T_hat||_F^2 + alpha * ||W o grad T||_1 by alternating a
// spectral least-squares T-update (periodic boundary), soft-shrinkage G-update
// and multiplier/penalty updates. Returns the best iterate found; the trace
// records its objective alongside the raw per-iterate value.
LimeResult refine_illumination_alm(const IlluminationMap& t_hat, const LimeParams& params);

// Objective evaluated with the same periodic forward-difference convention as
// the solver; shared with the validation oracles.
double lime_objective(const IlluminationMap& t, const IlluminationMap& t_hat, double alpha,
                      const std::vector<double>& wx, const std::vector<double>& wy);

RetinexDecomposition decompose(const Frame& frame, const IlluminationMap& t);

// H^gamma1 composed with clamp(R)^gamma2, clamped to [0,1].
Frame degrade(const RetinexDecomposition& decomp, const GammaParams& g);

// R^gamma2 o H^gamma1 with no clamping; feeds invert_gamma.
Frame degrade_unclamped(const RetinexDecomposition& decomp, const GammaParams& g);

// Inverse exponents applied to the unclamped degraded product; reconstructs
// R o H for round-trip validation.
Frame invert_gamma(const Frame& degraded, const RetinexDecomposition& decomp, const GammaParams& g);

void write_trace_csv(const std::vector<LimeIterStat>& trace, const std::string& path);

} // namespace tierforge
