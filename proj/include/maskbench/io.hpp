#pragma once

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "maskbench/error.hpp"
#include "maskbench/geometry.hpp"
#include "maskbench/image.hpp"

namespace maskbench {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw LoadError("cannot open file: " + path);
    return f;
}

} // namespace detail

// ---------------------------------------------------------------------------
// PNG

inline ImageBuffer read_png(const std::string& path) {
    detail::FilePtr file = detail::open_file(path, "rb");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw LoadError("libpng init failed for " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw LoadError("libpng init failed for " + path);
    }
    std::vector<png_bytep> rows;
    ImageBuffer img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw LoadError("failed to decode PNG: " + path);
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB or RGBA.
    png_set_expand(png);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    const png_byte color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));
    if (channels != 3 && channels != 4) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw LoadError("unsupported PNG channel count in " + path);
    }

    img = ImageBuffer(width, height, channels);
    rows.resize(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[static_cast<std::size_t>(y)] = img.data.data() + img.offset(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

// Output is bit-exact across runs: fixed compression settings, no ancillary
// chunks that depend on time or environment.
inline void write_png(const std::string& path, const ImageBuffer& img) {
    if (img.channels != 3 && img.channels != 4 && img.channels != 1)
        throw std::invalid_argument("write_png: unsupported channel count");

    detail::FilePtr file = detail::open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw LoadError("libpng init failed for " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw LoadError("libpng init failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw LoadError("failed to encode PNG: " + path);
    }

    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    const int color = img.channels == 1   ? PNG_COLOR_TYPE_GRAY
                      : img.channels == 3 ? PNG_COLOR_TYPE_RGB
                                          : PNG_COLOR_TYPE_RGBA;
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y)
        rows[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(img.data.data() + img.offset(0, y));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------------------
// JPEG (read only)

namespace detail {

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(err->jump, 1);
}

} // namespace detail

inline ImageBuffer read_jpeg(const std::string& path) {
    detail::FilePtr file = detail::open_file(path, "rb");

    jpeg_decompress_struct cinfo{};
    detail::JpegErrorMgr jerr{};
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = detail::jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw LoadError("failed to decode JPEG: " + path);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    ImageBuffer img(static_cast<int>(cinfo.output_width),
                    static_cast<int>(cinfo.output_height), 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.data.data() + img.offset(0, static_cast<int>(cinfo.output_scanline));
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

// Dispatches on magic bytes, not the extension.
inline ImageBuffer read_image(const std::string& path) {
    unsigned char magic[4] = {0, 0, 0, 0};
    {
        detail::FilePtr file = detail::open_file(path, "rb");
        if (std::fread(magic, 1, 4, file.get()) < 2)
            throw LoadError("file too short: " + path);
    }
    if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G')
        return read_png(path);
    if (magic[0] == 0xFF && magic[1] == 0xD8)
        return read_jpeg(path);
    throw LoadError("unrecognized image format: " + path);
}

// ---------------------------------------------------------------------------
// Landmark sidecars: 68 lines of "x y" in pixel coordinates.

inline LandmarkSet read_landmarks(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open landmark file: " + path);
    LandmarkSet lm;
    for (int i = 0; i < LandmarkSet::kPointCount; ++i) {
        if (!(in >> lm[i].x >> lm[i].y))
            throw LoadError("landmark file " + path + ": expected 68 \"x y\" lines, failed at line " +
                            std::to_string(i + 1));
    }
    double extra;
    if (in >> extra)
        throw LoadError("landmark file " + path + ": more than 68 points");
    try {
        lm.validate();
    } catch (const std::invalid_argument& e) {
        throw LoadError("landmark file " + path + ": " + e.what());
    }
    return lm;
}

inline void write_landmarks(const std::string& path, const LandmarkSet& lm) {
    std::ofstream out(path);
    if (!out)
        throw LoadError("cannot write landmark file: " + path);
    char line[64];
    for (const Point& p : lm.points) {
        std::snprintf(line, sizeof(line), "%.4f %.4f\n", p.x, p.y);
        out << line;
    }
    if (!out)
        throw LoadError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Small text helpers

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw LoadError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw LoadError("cannot write file: " + path);
    out << content;
    if (!out)
        throw LoadError("write failed: " + path);
}

} // namespace maskbench
