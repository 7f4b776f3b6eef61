#pragma once

#include <cstdint>
#include <string>

#include "tierforge/blur.hpp"
#include "tierforge/noise.hpp"
#include "tierforge/retinex.hpp"

namespace tierforge {

struct PipelineConfig {
    std::string input_root;
    std::string output_root;

    int resize_w = 0, resize_h = 0; // 0 disables the stage
    int crop_w = 0, crop_h = 0;

    BlurConfig blur;
    LimeParams lime;

    double gamma1_lo = 2.0, gamma1_hi = 3.5;
    double gamma2_lo = 1.05, gamma2_hi = 1.2;
    double noise_shot_lo = 0.01, noise_shot_hi = 0.01;
    double noise_read_lo = 1e-4, noise_read_hi = 1e-4;
    NoiseDomain noise_domain = NoiseDomain::linear;

    std::uint64_t master_seed = 0;
    int threads = 0; // 0 = runtime default
    int bit_depth = 16;

    void validate() const;
};

// Flat "key = value" file with '#' comments. Unknown keys are rejected.
PipelineConfig load_config(const std::string& path);

} // namespace tierforge
