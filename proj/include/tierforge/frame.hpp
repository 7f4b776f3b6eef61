#pragma once

#include <cstddef>
#include <vector>

#include "tierforge/errors.hpp"

namespace tierforge {

// Single image as row-major interleaved floating-point samples in [0,1].
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 0; // 1 or 3
    std::vector<double> data;

    Frame() = default;
    Frame(int w, int h, int c);

    static Frame constant(int w, int h, int c, double value);

    double& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    double at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }

    std::size_t sample_count() const { return data.size(); }
    bool same_shape(const Frame& other) const {
        return width == other.width && height == other.height && channels == other.channels;
    }
    bool empty() const { return data.empty(); }

    // Throws Error(bad_argument) if dimensions and buffer disagree or a sample
    // is not finite.
    void validate() const;
};

struct FrameSequence {
    std::vector<Frame> frames;
    double frame_rate = 60.0;

    std::size_t size() const { return frames.size(); }
    void validate() const; // consistent shapes, frame_rate > 0
};

// Bilinear resampling with half-pixel centers and edge clamping. Output values
// are convex combinations of source samples.
Frame resize_bilinear(const Frame& frame, int out_w, int out_h);
Frame resize_bilinear_serial(const Frame& frame, int out_w, int out_h);

// Centered window; offsets are floor((dim - out) / 2) per axis.
Frame center_crop(const Frame& frame, int out_w, int out_h);

} // namespace tierforge
