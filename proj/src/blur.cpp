#include "tierforge/blur.hpp"

#include <algorithm>
#include <cmath>

namespace tierforge {

namespace {

FrameSequence interpolate_impl(const FrameSequence& seq, int factor, bool parallel) {
    if (factor < 1) throw Error(Errc::bad_argument, "interpolate_sequence: factor must be >= 1");
    if (seq.size() < 2) throw Error(Errc::bad_argument, "interpolate_sequence: need at least 2 frames");
    seq.validate();

    const int n_in = static_cast<int>(seq.size());
    const int n_out = (n_in - 1) * factor + 1;
    FrameSequence out;
    out.frame_rate = seq.frame_rate * factor;
    out.frames.resize(n_out);

#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n_out; ++i) {
        const int base = i / factor;
        const int k = i - base * factor;
        if (k == 0) {
            out.frames[i] = seq.frames[base];
            continue;
        }
        const double t = static_cast<double>(k) / factor;
        const Frame& a = seq.frames[base];
        const Frame& b = seq.frames[base + 1];
        Frame f(a.width, a.height, a.channels);
        for (std::size_t s = 0; s < f.data.size(); ++s)
            f.data[s] = (1.0 - t) * a.data[s] + t * b.data[s];
        out.frames[i] = std::move(f);
    }
    return out;
}

Frame blur_impl(std::span<const Frame> frames, const CameraResponse& crf, bool parallel) {
    if (frames.empty()) throw Error(Errc::bad_argument, "synthesize_blur: empty frame list");
    for (const Frame& f : frames)
        if (!f.same_shape(frames.front()))
            throw Error(Errc::dimension_mismatch, "synthesize_blur: inconsistent frame shapes");

    const int n = static_cast<int>(frames.size());
    const Frame& first = frames.front();
    Frame out(first.width, first.height, first.channels);
    const std::ptrdiff_t samples = static_cast<std::ptrdiff_t>(out.data.size());

#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t s = 0; s < samples; ++s) {
        double acc = 0.0;
        for (int t = 0; t < n; ++t) acc += crf_invert(frames[t].data[s], crf);
        out.data[s] = std::clamp(crf_apply(acc / n, crf), 0.0, 1.0);
    }
    return out;
}

} // namespace

FrameSequence interpolate_sequence(const FrameSequence& seq, int factor) {
    return interpolate_impl(seq, factor, true);
}

FrameSequence interpolate_sequence_serial(const FrameSequence& seq, int factor) {
    return interpolate_impl(seq, factor, false);
}

Frame synthesize_blur(std::span<const Frame> frames, const CameraResponse& crf) {
    return blur_impl(frames, crf, true);
}

Frame synthesize_blur_serial(std::span<const Frame> frames, const CameraResponse& crf) {
    return blur_impl(frames, crf, false);
}

std::vector<BlurPair> make_pairs(const FrameSequence& seq, const BlurConfig& config) {
    config.validate();
    seq.validate();
    const int n = static_cast<int>(seq.size());
    const int wl = config.window_len;
    if (n < wl) throw Error(Errc::bad_argument, "make_pairs: sequence shorter than one window");

    const int count = n / wl;
    std::vector<BlurPair> pairs(count);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) {
        std::span<const Frame> window(seq.frames.data() + static_cast<std::ptrdiff_t>(k) * wl,
                                      static_cast<std::size_t>(wl));
        pairs[k].blurry = synthesize_blur_serial(window, config.crf);
        pairs[k].sharp = window[wl / 2];
    }
    return pairs;
}

} // namespace tierforge
