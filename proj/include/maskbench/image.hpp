#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace maskbench {

// Rounds half away from zero and clamps to the 8-bit range. All pixel
// arithmetic stays in double until this final store.
inline std::uint8_t store_u8(double v) {
    double r = std::round(v);
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    return static_cast<std::uint8_t>(r);
}

// Row-major 8-bit raster, 3 (RGB) or 4 (RGBA) channels. Channel order is
// fixed R,G,B[,A]; A=255 is fully opaque.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    ImageBuffer() = default;

    ImageBuffer(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("ImageBuffer: dimensions must be >= 1");
        if (c != 1 && c != 3 && c != 4)
            throw std::invalid_argument("ImageBuffer: channels must be 1, 3 or 4");
    }

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * channels;
    }

    std::uint8_t at(int x, int y, int c) const { return data[offset(x, y) + c]; }
    std::uint8_t& at(int x, int y, int c) { return data[offset(x, y) + c]; }

    bool same_size(const ImageBuffer& other) const {
        return width == other.width && height == other.height;
    }
};

namespace detail {

// Clamped fetch used by the resize sampler.
inline double sample_clamped(const ImageBuffer& img, int x, int y, int c) {
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return static_cast<double>(img.at(x, y, c));
}

} // namespace detail

// Bilinear resize with pixel-center alignment: the output pixel i maps to
// source coordinate (i + 0.5) * in/out - 0.5. Edges clamp.
inline ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw std::invalid_argument("resize_bilinear: target size must be >= 1, got " +
                                    std::to_string(out_w) + "x" + std::to_string(out_h));
    if (out_w == img.width && out_h == img.height)
        return img;

    ImageBuffer out(out_w, out_h, img.channels);
    const double scale_x = static_cast<double>(img.width) / out_w;
    const double scale_y = static_cast<double>(img.height) / out_h;

    for (int oy = 0; oy < out_h; ++oy) {
        const double sy = (oy + 0.5) * scale_y - 0.5;
        const int y0 = static_cast<int>(std::floor(sy));
        const double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx = (ox + 0.5) * scale_x - 0.5;
            const int x0 = static_cast<int>(std::floor(sx));
            const double fx = sx - x0;
            for (int c = 0; c < img.channels; ++c) {
                const double v00 = detail::sample_clamped(img, x0, y0, c);
                const double v10 = detail::sample_clamped(img, x0 + 1, y0, c);
                const double v01 = detail::sample_clamped(img, x0, y0 + 1, c);
                const double v11 = detail::sample_clamped(img, x0 + 1, y0 + 1, c);
                const double v = v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) +
                                 v01 * (1 - fx) * fy + v11 * fx * fy;
                out.at(ox, oy, c) = store_u8(v);
            }
        }
    }
    return out;
}

// out = (A/255) * fg + (1 - A/255) * bg, per channel.
inline ImageBuffer composite_alpha(const ImageBuffer& fg, const ImageBuffer& bg) {
    if (fg.channels != 4)
        throw std::invalid_argument("composite_alpha: foreground must be RGBA");
    if (bg.channels != 3)
        throw std::invalid_argument("composite_alpha: background must be RGB");
    if (!fg.same_size(bg))
        throw std::invalid_argument(
            "composite_alpha: dimension mismatch (" + std::to_string(fg.width) + "x" +
            std::to_string(fg.height) + " vs " + std::to_string(bg.width) + "x" +
            std::to_string(bg.height) + ")");

    ImageBuffer out(bg.width, bg.height, 3);
    const std::size_t n = static_cast<std::size_t>(bg.width) * bg.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* f = fg.data.data() + i * 4;
        const std::uint8_t* b = bg.data.data() + i * 3;
        std::uint8_t* o = out.data.data() + i * 3;
        const double a = f[3] / 255.0;
        for (int c = 0; c < 3; ++c)
            o[c] = store_u8(a * f[c] + (1.0 - a) * b[c]);
    }
    return out;
}

// Extracts the alpha plane of an RGBA image as a single-channel buffer.
inline ImageBuffer alpha_plane(const ImageBuffer& img) {
    if (img.channels != 4)
        throw std::invalid_argument("alpha_plane: image has no alpha channel");
    ImageBuffer out(img.width, img.height, 1);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i)
        out.data[i] = img.data[i * 4 + 3];
    return out;
}

} // namespace maskbench
