#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tierforge/blur.hpp"

using namespace tierforge;

TEST_SUITE("blur") {

TEST_CASE("crf closed forms") {
    const CameraResponse id = CameraResponse::identity();
    CHECK(crf_apply(0.37, id) == 0.37);
    CHECK(crf_invert(0.8, id) == 0.8);

    const CameraResponse g22 = CameraResponse::gamma(2.2);
    CHECK(crf_apply(0.0, g22) == 0.0);
    CHECK(crf_apply(1.0, g22) == 1.0);

    const CameraResponse g2 = CameraResponse::gamma(2.0);
    CHECK(crf_apply(0.25, g2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(crf_invert(0.5, g2) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("crf round trip under 1e-6 on random values") {
    const CameraResponse g22 = CameraResponse::gamma(2.2);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng::uniform(99, i);
        CHECK(std::abs(crf_invert(crf_apply(x, g22), g22) - x) < 1e-6);
    }
}

TEST_CASE("interpolation length, blending, original preservation") {
    FrameSequence seq;
    seq.frames.push_back(Frame::constant(3, 2, 1, 0.0));
    seq.frames.push_back(Frame::constant(3, 2, 1, 1.0));

    FrameSequence same = interpolate_sequence(seq, 1);
    CHECK(same.size() == 2);
    CHECK(same.frames[0].data == seq.frames[0].data);
    CHECK(same.frames[1].data == seq.frames[1].data);

    FrameSequence mid = interpolate_sequence(seq, 2);
    CHECK(mid.size() == 3);
    for (double v : mid.frames[1].data) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));

    FrameSequence ramp;
    ramp.frames.push_back(Frame::constant(2, 2, 3, 0.0));
    ramp.frames.push_back(Frame::constant(2, 2, 3, 0.9));
    FrameSequence thirds = interpolate_sequence(ramp, 3);
    CHECK(thirds.size() == 4);
    for (double v : thirds.frames[1].data) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
    for (double v : thirds.frames[2].data) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(thirds.frames[0].data == ramp.frames[0].data); // exact copies at stride positions
    CHECK(thirds.frames[3].data == ramp.frames[1].data);

    CHECK_THROWS_AS(static_cast<void>(interpolate_sequence(seq, 0)), Error);
}

TEST_CASE("interpolation parallel equals serial") {
    FrameSequence seq;
    for (int i = 0; i < 5; ++i) seq.frames.push_back(testutil::random_frame(8, 6, 3, 70 + i));
    FrameSequence a = interpolate_sequence(seq, 4);
    FrameSequence b = interpolate_sequence_serial(seq, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.frames[i].data == b.frames[i].data);
}

TEST_CASE("blur of identical frames returns that frame") {
    const Frame f = testutil::random_frame(6, 5, 3, 21);
    const std::vector<Frame> frames(7, f);
    for (const auto& crf : {CameraResponse::identity(), CameraResponse::gamma(2.2)}) {
        const Frame out = synthesize_blur(frames, crf);
        CHECK(testutil::max_abs_diff(out, f) < 1e-12);
    }
}

TEST_CASE("blur closed forms and oracle agreement") {
    std::vector<Frame> frames{Frame::constant(2, 2, 1, 0.0), Frame::constant(2, 2, 1, 1.0)};
    const Frame mid = synthesize_blur(frames, CameraResponse::identity());
    for (double v : mid.data) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));

    std::vector<Frame> pair{Frame::constant(2, 2, 1, 0.25), Frame::constant(2, 2, 1, 1.0)};
    const Frame g = synthesize_blur(pair, CameraResponse::gamma(2.0));
    // linear {0.0625, 1.0}, mean 0.53125, sqrt = 0.7288...
    for (double v : g.data) CHECK(v == doctest::Approx(std::sqrt(0.53125)).epsilon(1e-9));
    CHECK(testutil::max_abs_diff(g, oracle::blur(pair, CameraResponse::gamma(2.0))) < 1e-15);

    for (int trial = 0; trial < 8; ++trial) {
        std::vector<Frame> rnd;
        for (int i = 0; i < 5; ++i) rnd.push_back(testutil::random_frame(7, 4, 3, 300 + 10 * trial + i));
        for (const auto& crf : {CameraResponse::identity(), CameraResponse::gamma(2.2)}) {
            const Frame out = synthesize_blur(rnd, crf);
            CHECK(testutil::max_abs_diff(out, oracle::blur(rnd, crf)) < 1e-7);
        }
    }
}

TEST_CASE("blur is permutation-invariant in frame order") {
    std::vector<Frame> frames;
    for (int i = 0; i < 9; ++i) frames.push_back(testutil::random_frame(5, 5, 1, 800 + i));
    const Frame base = synthesize_blur(frames, CameraResponse::gamma(2.2));
    std::mt19937 gen(1234);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(frames.begin(), frames.end(), gen);
        CHECK(testutil::max_abs_diff(synthesize_blur(frames, CameraResponse::gamma(2.2)), base) < 1e-12);
    }
}

TEST_CASE("blur parallel equals serial") {
    std::vector<Frame> frames;
    for (int i = 0; i < 6; ++i) frames.push_back(testutil::random_frame(32, 24, 3, 900 + i));
    CHECK(synthesize_blur(frames, CameraResponse::gamma(2.2)).data ==
          synthesize_blur_serial(frames, CameraResponse::gamma(2.2)).data);
}

TEST_CASE("blur error cases") {
    CHECK_THROWS_AS(static_cast<void>(synthesize_blur({}, CameraResponse::identity())), Error);
    std::vector<Frame> bad{Frame::constant(2, 2, 1, 0.1), Frame::constant(3, 2, 1, 0.1)};
    CHECK_THROWS_AS(static_cast<void>(synthesize_blur(bad, CameraResponse::identity())), Error);
}

TEST_CASE("pair windowing arithmetic: 19200 frames at window 160 give 120 pairs") {
    FrameSequence seq;
    seq.frames.reserve(19200);
    for (int i = 0; i < 19200; ++i)
        seq.frames.push_back(Frame::constant(1, 1, 1, (i % 251) / 251.0));
    BlurConfig cfg;
    cfg.window_len = 160;
    cfg.crf = CameraResponse::identity();
    const auto pairs = make_pairs(seq, cfg);
    CHECK(pairs.size() == 120);
    // middle frame of window k is frame k*160 + 80
    for (int k : {0, 59, 119})
        CHECK(pairs[k].sharp.data[0] == seq.frames[k * 160 + 80].data[0]);
}

TEST_CASE("unit windows degenerate to identity pairs") {
    FrameSequence seq;
    for (int i = 0; i < 3; ++i) seq.frames.push_back(Frame::constant(2, 2, 1, 0.2 + 0.1 * i));
    BlurConfig cfg;
    cfg.window_len = 1;
    const auto pairs = make_pairs(seq, cfg);
    REQUIRE(pairs.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(testutil::max_abs_diff(pairs[k].blurry, seq.frames[k]) < 1e-12);
        CHECK(pairs[k].sharp.data == seq.frames[k].data);
    }
}

TEST_CASE("constant window gives blurry equal to sharp") {
    FrameSequence seq;
    for (int i = 0; i < 160; ++i) seq.frames.push_back(Frame::constant(3, 3, 1, 0.42));
    BlurConfig cfg;
    cfg.window_len = 160;
    const auto pairs = make_pairs(seq, cfg);
    REQUIRE(pairs.size() == 1);
    CHECK(testutil::max_abs_diff(pairs[0].blurry, pairs[0].sharp) < 1e-12);
    for (double v : pairs[0].sharp.data) CHECK(v == 0.42);
}

TEST_CASE("moving dot conserves mass under the identity CRF") {
    const int w = 20, h = 16;
    FrameSequence seq;
    for (int i = 0; i < 320; ++i) {
        Frame f(w, h, 1);
        f.at((i / w) % h, i % w, 0) = 1.0;
        seq.frames.push_back(std::move(f));
    }
    BlurConfig cfg;
    cfg.window_len = 160;
    cfg.crf = CameraResponse::identity();
    const auto pairs = make_pairs(seq, cfg);
    REQUIRE(pairs.size() == 2);
    for (const auto& p : pairs) {
        const double mass = std::accumulate(p.blurry.data.begin(), p.blurry.data.end(), 0.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9)); // each source frame holds unit mass
    }
}

TEST_CASE("windows are disjoint and cover a prefix") {
    FrameSequence seq;
    for (int i = 0; i < 330; ++i) seq.frames.push_back(Frame::constant(1, 1, 1, i / 330.0));
    BlurConfig cfg;
    cfg.window_len = 160;
    cfg.crf = CameraResponse::identity();
    const auto pairs = make_pairs(seq, cfg);
    REQUIRE(pairs.size() == 2);
    // Identity-CRF blur of window k is the mean of its members, which pins the
    // window contents.
    for (int k = 0; k < 2; ++k) {
        double expect = 0.0;
        for (int i = k * 160; i < (k + 1) * 160; ++i) expect += i / 330.0;
        expect /= 160.0;
        CHECK(pairs[k].blurry.data[0] == doctest::Approx(expect).epsilon(1e-12));
    }

    FrameSequence small;
    small.frames.push_back(Frame::constant(1, 1, 1, 0.5));
    CHECK_THROWS_AS(static_cast<void>(make_pairs(small, cfg)), Error);
}

} // TEST_SUITE
