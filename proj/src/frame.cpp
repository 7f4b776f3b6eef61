#include "tierforge/frame.hpp"

#include <algorithm>
#include <cmath>

namespace tierforge {

Frame::Frame(int w, int h, int c) : width(w), height(h), channels(c) {
    if (w < 1 || h < 1 || (c != 1 && c != 3))
        throw Error(Errc::bad_argument, "Frame: invalid dimensions");
    data.assign(static_cast<std::size_t>(w) * h * c, 0.0);
}

Frame Frame::constant(int w, int h, int c, double value) {
    Frame f(w, h, c);
    std::fill(f.data.begin(), f.data.end(), value);
    return f;
}

void Frame::validate() const {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw Error(Errc::bad_argument, "Frame: invalid dimensions");
    if (data.size() != static_cast<std::size_t>(width) * height * channels)
        throw Error(Errc::bad_argument, "Frame: data length does not match dimensions");
    for (double v : data)
        if (!std::isfinite(v))
            throw Error(Errc::bad_argument, "Frame: non-finite sample");
}

void FrameSequence::validate() const {
    if (frame_rate <= 0.0)
        throw Error(Errc::bad_argument, "FrameSequence: frame_rate must be positive");
    for (const Frame& f : frames)
        if (!f.same_shape(frames.front()))
            throw Error(Errc::dimension_mismatch, "FrameSequence: inconsistent frame shapes");
}

namespace {

struct Tap {
    int lo, hi;
    double w_hi; // weight of hi sample; lo gets 1 - w_hi
};

// Half-pixel-center mapping: src = (dst + 0.5) * scale - 0.5, clamped to the
// valid sample range.
Tap tap_for(int dst, int dst_size, int src_size) {
    const double scale = static_cast<double>(src_size) / dst_size;
    double src = (dst + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(src_size - 1));
    Tap t;
    t.lo = static_cast<int>(std::floor(src));
    t.hi = std::min(t.lo + 1, src_size - 1);
    t.w_hi = src - t.lo;
    return t;
}

Frame resize_impl(const Frame& frame, int out_w, int out_h, bool parallel) {
    if (out_w < 1 || out_h < 1)
        throw Error(Errc::bad_argument, "resize_bilinear: target dimensions must be >= 1");
    frame.validate();

    std::vector<Tap> xs(out_w);
    for (int x = 0; x < out_w; ++x) xs[x] = tap_for(x, out_w, frame.width);

    Frame out(out_w, out_h, frame.channels);
    const int ch = frame.channels;
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < out_h; ++y) {
        const Tap ty = tap_for(y, out_h, frame.height);
        for (int x = 0; x < out_w; ++x) {
            const Tap& tx = xs[x];
            for (int c = 0; c < ch; ++c) {
                const double top = (1.0 - tx.w_hi) * frame.at(ty.lo, tx.lo, c) + tx.w_hi * frame.at(ty.lo, tx.hi, c);
                const double bot = (1.0 - tx.w_hi) * frame.at(ty.hi, tx.lo, c) + tx.w_hi * frame.at(ty.hi, tx.hi, c);
                out.at(y, x, c) = (1.0 - ty.w_hi) * top + ty.w_hi * bot;
            }
        }
    }
    return out;
}

} // namespace

Frame resize_bilinear(const Frame& frame, int out_w, int out_h) {
    return resize_impl(frame, out_w, out_h, true);
}

Frame resize_bilinear_serial(const Frame& frame, int out_w, int out_h) {
    return resize_impl(frame, out_w, out_h, false);
}

Frame center_crop(const Frame& frame, int out_w, int out_h) {
    frame.validate();
    if (out_w < 1 || out_h < 1 || out_w > frame.width || out_h > frame.height)
        throw Error(Errc::bad_argument, "center_crop: crop larger than source");
    const int x0 = (frame.width - out_w) / 2;
    const int y0 = (frame.height - out_h) / 2;
    Frame out(out_w, out_h, frame.channels);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            for (int c = 0; c < frame.channels; ++c)
                out.at(y, x, c) = frame.at(y0 + y, x0 + x, c);
    return out;
}

} // namespace tierforge
