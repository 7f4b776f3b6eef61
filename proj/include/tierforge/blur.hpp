#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tierforge/crf.hpp"
#include "tierforge/frame.hpp"

namespace tierforge {

struct BlurConfig {
    int window_len = 160;   // frames averaged into one blurred image
    int interp_factor = 32; // temporal upsampling applied before windowing
    CameraResponse crf = CameraResponse::gamma(2.2);

    void validate() const {
        if (window_len < 1) throw Error(Errc::bad_argument, "BlurConfig: window_len must be >= 1");
        if (interp_factor < 1) throw Error(Errc::bad_argument, "BlurConfig: interp_factor must be >= 1");
    }
};

struct BlurPair {
    Frame blurry;
    Frame sharp;
};

// Linear cross-fade upsampling: output length (n-1)*factor + 1, originals
// preserved exactly at stride positions.
FrameSequence interpolate_sequence(const FrameSequence& seq, int factor);
FrameSequence interpolate_sequence_serial(const FrameSequence& seq, int factor);

// Per-pixel mean in CRF-linearized space: g(mean_t g^{-1}(I_t)), clamped to [0,1].
Frame synthesize_blur(std::span<const Frame> frames, const CameraResponse& crf);
Frame synthesize_blur_serial(std::span<const Frame> frames, const CameraResponse& crf);

// Non-overlapping windows of window_len frames covering a prefix of the
// sequence; sharp frame is window[window_len / 2].
std::vector<BlurPair> make_pairs(const FrameSequence& seq, const BlurConfig& config);

} // namespace tierforge
