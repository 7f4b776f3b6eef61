// Times the OpenMP kernels against their serial references and verifies the
// outputs agree bit for bit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <omp.h>
#include <vector>

#include "tierforge/blur.hpp"
#include "tierforge/fft.hpp"
#include "tierforge/losses.hpp"
#include "tierforge/noise.hpp"
#include "tierforge/retinex.hpp"
#include "tierforge/rng.hpp"

using namespace tierforge;

namespace {

Frame random_frame(int w, int h, int c, std::uint64_t seed) {
    Frame f(w, h, c);
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = rng::uniform(seed, i);
    return f;
}

double time_s(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-24s serial %8.2f ms   omp %8.2f ms   speedup %.2fx   %s\n", name, serial * 1e3,
                parallel * 1e3, serial / parallel, identical ? "bit-identical" : "OUTPUTS DIFFER");
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", omp_get_max_threads());

    {
        std::vector<Frame> frames;
        for (int i = 0; i < 48; ++i) frames.push_back(random_frame(640, 360, 3, 100 + i));
        const auto crf = CameraResponse::gamma(2.2);
        Frame out_p, out_s;
        const double tp = time_s([&] { out_p = synthesize_blur(frames, crf); }, 3);
        const double ts = time_s([&] { out_s = synthesize_blur_serial(frames, crf); }, 3);
        report("synthesize_blur", ts, tp, out_p.data == out_s.data);
    }

    {
        const Frame f = random_frame(1280, 720, 3, 7);
        NoiseParams p;
        p.seed = 9;
        const auto crf = CameraResponse::gamma(2.2);
        Frame out_p, out_s;
        const double tp = time_s([&] { out_p = add_signal_dependent_noise(f, p, crf); }, 5);
        const double ts = time_s([&] { out_s = add_signal_dependent_noise_serial(f, p, crf); }, 5);
        report("add_noise", ts, tp, out_p.data == out_s.data);
    }

    {
        const Frame f = random_frame(3840, 2160, 3, 8);
        Frame out_p, out_s;
        const double tp = time_s([&] { out_p = resize_bilinear(f, 1280, 720); }, 5);
        const double ts = time_s([&] { out_s = resize_bilinear_serial(f, 1280, 720); }, 5);
        report("resize_bilinear 4k->720p", ts, tp, out_p.data == out_s.data);
    }

    {
        const Frame a = random_frame(1280, 720, 3, 10);
        const Frame b = random_frame(1280, 720, 3, 11);
        double vp = 0, vs = 0;
        const double tp = time_s([&] { vp = ssim(a, b); }, 3);
        const double ts = time_s([&] { vs = ssim_serial(a, b); }, 3);
        report("ssim 720p", ts, tp, vp == vs);
    }

    {
        const Frame a = random_frame(1280, 720, 3, 12);
        const Frame b = random_frame(1280, 720, 3, 13);
        double vp = 0, vs = 0;
        const double tp = time_s([&] { vp = charbonnier(a, b); }, 10);
        const double ts = time_s([&] { vs = charbonnier_serial(a, b); }, 10);
        report("charbonnier 720p", ts, tp, vp == vs);
    }

    {
        std::vector<std::complex<double>> sig(512 * 512);
        for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = rng::uniform(14, i);
        auto a = sig, b = sig;
        const double tp = time_s([&] { a = sig; fft_2d(a, 512, 512, false); }, 5);
        const double ts = time_s([&] { b = sig; fft_2d_serial(b, 512, 512, false); }, 5);
        report("fft_2d 512x512", ts, tp, a == b);
    }

    {
        IlluminationMap t(256, 256);
        for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] = rng::uniform_range(15, i, 0.1, 1.0);
        LimeParams params;
        params.max_iter = 30;
        LimeResult r1, r2;
        omp_set_num_threads(omp_get_max_threads());
        const double tp = time_s([&] { r1 = refine_illumination_alm(t, params); }, 2);
        omp_set_num_threads(1);
        const double ts = time_s([&] { r2 = refine_illumination_alm(t, params); }, 2);
        omp_set_num_threads(omp_get_max_threads());
        report("alm_refine 256x256", ts, tp, r1.refined.data == r2.refined.data);
    }

    return 0;
}
