#include "tierforge/png_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <memory>
#include <png.h>
#include <vector>

namespace tierforge {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

Frame load_frame(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        if (errno == ENOENT)
            throw Error(Errc::file_not_found, "load_frame: no such file: " + path);
        throw Error(Errc::io_failure, "load_frame: cannot open: " + path);
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(Errc::io_failure, "load_frame: png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(Errc::io_failure, "load_frame: png info init failed");
    }

    std::vector<png_byte> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::io_failure, "load_frame: corrupt PNG: " + path);
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);

    if ((color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB) || (depth != 8 && depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::unsupported_image,
                    "load_frame: only 8/16-bit grayscale or RGB PNG supported: " + path);
    }

    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const int channels = (color == PNG_COLOR_TYPE_GRAY) ? 1 : 3;
    const std::size_t stride = png_get_rowbytes(png, info);
    bytes.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = bytes.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Frame frame(static_cast<int>(width), static_cast<int>(height), channels);
    const double scale = 1.0 / ((1u << depth) - 1u);
    const std::size_t samples_per_row = static_cast<std::size_t>(width) * channels;
    for (png_uint_32 y = 0; y < height; ++y) {
        const png_byte* row = bytes.data() + y * stride;
        for (std::size_t i = 0; i < samples_per_row; ++i) {
            unsigned v;
            if (depth == 8)
                v = row[i];
            else
                v = (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1]; // PNG is big-endian
            frame.data[y * samples_per_row + i] = v * scale;
        }
    }
    return frame;
}

void save_frame(const Frame& frame, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw Error(Errc::bad_argument, "save_frame: bit depth must be 8 or 16");
    frame.validate();

    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw Error(Errc::io_failure, "save_frame: cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(Errc::io_failure, "save_frame: png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(Errc::io_failure, "save_frame: png info init failed");
    }

    const unsigned maxval = (1u << bit_depth) - 1u;
    const std::size_t samples_per_row = static_cast<std::size_t>(frame.width) * frame.channels;
    const std::size_t stride = samples_per_row * (bit_depth / 8);
    std::vector<png_byte> bytes(stride * frame.height);
    for (int y = 0; y < frame.height; ++y) {
        png_byte* row = bytes.data() + static_cast<std::size_t>(y) * stride;
        for (std::size_t i = 0; i < samples_per_row; ++i) {
            const double v = std::clamp(frame.data[y * samples_per_row + i], 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(std::lround(v * maxval));
            if (bit_depth == 8) {
                row[i] = static_cast<png_byte>(q);
            } else {
                row[2 * i] = static_cast<png_byte>(q >> 8);
                row[2 * i + 1] = static_cast<png_byte>(q & 0xFF);
            }
        }
    }

    std::vector<png_bytep> rows(frame.height);
    for (int y = 0; y < frame.height; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * stride;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(Errc::io_failure, "save_frame: write failed: " + path);
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, frame.width, frame.height, bit_depth,
                 frame.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);

    if (std::fflush(file.get()) != 0)
        throw Error(Errc::io_failure, "save_frame: flush failed: " + path);
}

} // namespace tierforge
