#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tierforge/crf.hpp"
#include "tierforge/frame.hpp"

namespace tierforge {

enum class NoiseDomain { linear, display };

// Heteroscedastic Gaussian model: variance a*x + b at linear intensity x.
struct NoiseParams {
    double shot = 0.01;  // a, variance slope vs intensity
    double read = 1e-4;  // b, variance floor
    std::uint64_t seed = 0;
    NoiseDomain domain = NoiseDomain::linear;

    void validate() const {
        if (shot < 0.0 || read < 0.0)
            throw Error(Errc::bad_argument, "NoiseParams: shot/read must be non-negative");
    }
};

// Adds Normal(0, a*x + b) per sample in the CRF-linearized domain and
// re-applies the CRF; domain == display skips the CRF transforms. Draws come
// from a counter-based generator keyed by (seed, sample index), so the output
// depends only on (frame, params, crf). a = b = 0 returns the frame unchanged.
Frame add_signal_dependent_noise(const Frame& frame, const NoiseParams& params, const CameraResponse& crf);
Frame add_signal_dependent_noise_serial(const Frame& frame, const NoiseParams& params, const CameraResponse& crf);

// Buckets samples by clean linear intensity and reports per-bucket residual
// variance; empty buckets are omitted.
std::vector<std::pair<double, double>> estimate_noise_variance(const Frame& clean, const Frame& noisy, int bins);

} // namespace tierforge
