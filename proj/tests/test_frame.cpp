#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <png.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tierforge/frame.hpp"
#include "tierforge/png_io.hpp"

using namespace tierforge;
using testutil::TempDir;

namespace {

// Writes a PNG directly through libpng so load_frame is checked against an
// independently produced file, not our own encoder.
void write_reference_png(const std::string& path, int w, int h, int channels, int depth,
                         const std::vector<unsigned>& samples) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, f);
    const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY
                      : channels == 3 ? PNG_COLOR_TYPE_RGB
                                      : PNG_COLOR_TYPE_RGB_ALPHA;
    png_set_IHDR(png, info, w, h, depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t spr = static_cast<std::size_t>(w) * channels;
    std::vector<png_byte> row(spr * depth / 8);
    for (int y = 0; y < h; ++y) {
        for (std::size_t i = 0; i < spr; ++i) {
            const unsigned v = samples[y * spr + i];
            if (depth == 8) row[i] = static_cast<png_byte>(v);
            else {
                row[2 * i] = static_cast<png_byte>(v >> 8);
                row[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

} // namespace

TEST_SUITE("frame") {

TEST_CASE("load normalizes by the bit-depth maximum") {
    TempDir dir("frame_load");
    write_reference_png(dir.str("a.png"), 2, 1, 1, 8, {255, 0});
    Frame f8 = load_frame(dir.str("a.png"));
    CHECK(f8.data[0] == 1.0);
    CHECK(f8.data[1] == 0.0);

    write_reference_png(dir.str("b.png"), 1, 1, 1, 16, {32768});
    Frame f16 = load_frame(dir.str("b.png"));
    CHECK(f16.data[0] == doctest::Approx(32768.0 / 65535.0).epsilon(1e-12));
}

TEST_CASE("load error cases are distinct") {
    TempDir dir("frame_err");
    try {
        static_cast<void>(load_frame(dir.str("missing.png")));
        FAIL("expected file_not_found");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::file_not_found);
    }

    write_reference_png(dir.str("rgba.png"), 2, 2, 4, 8, std::vector<unsigned>(16, 10));
    try {
        static_cast<void>(load_frame(dir.str("rgba.png")));
        FAIL("expected unsupported_image");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unsupported_image);
    }
}

TEST_CASE("save/load round trip stays within the quantization step") {
    TempDir dir("frame_rt");
    Frame half = Frame::constant(6, 4, 3, 0.5);
    save_frame(half, dir.str("h.png"), 16);
    CHECK(testutil::max_abs_diff(load_frame(dir.str("h.png")), half) <= 1.0 / 65535.0);

    Frame rnd = testutil::random_frame(9, 7, 3, 42);
    save_frame(rnd, dir.str("r.png"), 8);
    CHECK(testutil::max_abs_diff(load_frame(dir.str("r.png")), rnd) <= 1.0 / 255.0);

    Frame zeros = Frame::constant(5, 5, 1, 0.0);
    save_frame(zeros, dir.str("z.png"), 8);
    Frame back = load_frame(dir.str("z.png"));
    for (double v : back.data) CHECK(v == 0.0);
}

TEST_CASE("round trip bound holds for many random frames") {
    TempDir dir("frame_mass");
    const std::string path = dir.str("f.png");
    for (int i = 0; i < 10000; ++i) {
        const int depth = (i % 2 == 0) ? 8 : 16;
        const double step = 1.0 / ((1u << depth) - 1u);
        Frame f = testutil::random_frame(4, 3, (i % 4 < 2) ? 1 : 3, 1000 + i);
        save_frame(f, path, depth);
        CHECK(testutil::max_abs_diff(load_frame(path), f) <= step);
    }
}

TEST_CASE("resize keeps constants and matches the brute-force oracle") {
    Frame c = Frame::constant(7, 5, 3, 0.3);
    Frame r = resize_bilinear(c, 3, 9);
    for (double v : r.data) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));

    Frame two(2, 1, 1);
    two.data = {0.0, 1.0};
    Frame one = resize_bilinear(two, 1, 1);
    CHECK(one.data[0] >= 0.0);
    CHECK(one.data[0] <= 1.0);
    CHECK(one.data[0] == doctest::Approx(oracle::bilinear(two, 1, 1, 0, 0, 0)).epsilon(1e-12));

    Frame rnd = testutil::random_frame(4, 4, 1, 7);
    Frame same = resize_bilinear(rnd, 4, 4);
    CHECK(same.data == rnd.data);
}

TEST_CASE("resize output range is inside the input range") {
    for (int trial = 0; trial < 20; ++trial) {
        Frame src = testutil::random_frame(5 + trial % 7, 4 + trial % 5, 1, 90 + trial);
        const auto [mn, mx] = std::minmax_element(src.data.begin(), src.data.end());
        Frame dst = resize_bilinear(src, 3 + trial % 9, 2 + trial % 8);
        for (double v : dst.data) {
            CHECK(v >= *mn - 1e-12);
            CHECK(v <= *mx + 1e-12);
        }
    }
}

TEST_CASE("resize matches the oracle on random frames and sizes") {
    for (int trial = 0; trial < 10; ++trial) {
        Frame src = testutil::random_frame(3 + trial, 2 + trial % 5, 3, 500 + trial);
        const int ow = 1 + trial % 7, oh = 2 + trial % 6;
        Frame dst = resize_bilinear(src, ow, oh);
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x)
                for (int c = 0; c < 3; ++c)
                    CHECK(dst.at(y, x, c) ==
                          doctest::Approx(oracle::bilinear(src, ow, oh, y, x, c)).epsilon(1e-12));
    }
}

TEST_CASE("resize parallel path equals the serial reference") {
    Frame src = testutil::random_frame(64, 48, 3, 11);
    Frame a = resize_bilinear(src, 29, 37);
    Frame b = resize_bilinear_serial(src, 29, 37);
    CHECK(a.data == b.data);
}

TEST_CASE("center crop picks the floor-offset window") {
    Frame f(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) f.at(y, x, 0) = y * 4 + x;

    Frame c = center_crop(f, 2, 2);
    CHECK(c.at(0, 0, 0) == 5.0); // row 1, col 1
    CHECK(c.at(1, 1, 0) == 10.0);

    Frame full = center_crop(f, 4, 4);
    CHECK(full.data == f.data);

    Frame odd(5, 5, 1);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) odd.at(y, x, 0) = y * 5 + x;
    Frame oc = center_crop(odd, 2, 2);
    // offset floor((5-2)/2) = 1 on both axes
    CHECK(oc.at(0, 0, 0) == 6.0);
    CHECK(oc.at(1, 1, 0) == 12.0);
}

TEST_CASE("center crop is idempotent at fixed size") {
    Frame f = testutil::random_frame(9, 7, 3, 3);
    Frame once = center_crop(f, 4, 3);
    Frame twice = center_crop(once, 4, 3);
    CHECK(once.data == twice.data);
}

TEST_CASE("dimension errors") {
    Frame f = Frame::constant(4, 4, 1, 0.1);
    CHECK_THROWS_AS(static_cast<void>(resize_bilinear(f, 0, 4)), Error);
    CHECK_THROWS_AS(static_cast<void>(center_crop(f, 5, 2)), Error);
    TempDir dir("frame_dim");
    CHECK_THROWS_AS(save_frame(f, dir.str("x.png"), 12), Error);
}

} // TEST_SUITE
