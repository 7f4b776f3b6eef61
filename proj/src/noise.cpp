#include "tierforge/noise.hpp"

#include <algorithm>
#include <cmath>

#include "tierforge/rng.hpp"

namespace tierforge {

namespace {

Frame add_noise_impl(const Frame& frame, const NoiseParams& params, const CameraResponse& crf, bool parallel) {
    params.validate();
    frame.validate();
    if (params.shot == 0.0 && params.read == 0.0) return frame;

    Frame out(frame.width, frame.height, frame.channels);
    const bool use_crf = params.domain == NoiseDomain::linear;
    const std::ptrdiff_t samples = static_cast<std::ptrdiff_t>(frame.data.size());

#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t s = 0; s < samples; ++s) {
        const double x = use_crf ? crf_invert(frame.data[s], crf) : frame.data[s];
        const double sigma = std::sqrt(params.shot * x + params.read);
        const double y = x + sigma * rng::normal(params.seed, static_cast<std::uint64_t>(s));
        out.data[s] = std::clamp(use_crf ? crf_apply(std::clamp(y, 0.0, 1.0), crf) : y, 0.0, 1.0);
    }
    return out;
}

} // namespace

Frame add_signal_dependent_noise(const Frame& frame, const NoiseParams& params, const CameraResponse& crf) {
    return add_noise_impl(frame, params, crf, true);
}

Frame add_signal_dependent_noise_serial(const Frame& frame, const NoiseParams& params, const CameraResponse& crf) {
    return add_noise_impl(frame, params, crf, false);
}

std::vector<std::pair<double, double>> estimate_noise_variance(const Frame& clean, const Frame& noisy, int bins) {
    if (bins < 1) throw Error(Errc::bad_argument, "estimate_noise_variance: bins must be >= 1");
    if (!clean.same_shape(noisy))
        throw Error(Errc::dimension_mismatch, "estimate_noise_variance: frame shapes differ");

    std::vector<double> sum_x(bins, 0.0), sum_r(bins, 0.0), sum_r2(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    for (std::size_t s = 0; s < clean.data.size(); ++s) {
        const double x = clean.data[s];
        int k = static_cast<int>(x * bins);
        k = std::clamp(k, 0, bins - 1);
        const double r = noisy.data[s] - x;
        sum_x[k] += x;
        sum_r[k] += r;
        sum_r2[k] += r * r;
        ++count[k];
    }

    std::vector<std::pair<double, double>> result;
    for (int k = 0; k < bins; ++k) {
        if (count[k] == 0) continue;
        const double n = static_cast<double>(count[k]);
        const double mean_r = sum_r[k] / n;
        result.emplace_back(sum_x[k] / n, sum_r2[k] / n - mean_r * mean_r);
    }
    return result;
}

} // namespace tierforge
