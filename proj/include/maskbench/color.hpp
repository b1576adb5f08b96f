#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "maskbench/image.hpp"

namespace maskbench {

// CIE L*a*b* sample, D65 reference white. L in [0,100] for in-gamut input.
struct LabPixel {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

// Plane of Lab samples with the raster dimensions it came from.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<LabPixel> pixels;

    const LabPixel& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    LabPixel& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {

// sRGB decode table: only 256 inputs exist, so precompute them once.
inline const std::array<double, 256>& srgb_decode_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            t[i] = (c <= 0.04045) ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table;
}

inline double srgb_encode(double linear) {
    if (linear <= 0.0031308) return 12.92 * linear;
    return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

// D65 white point matching the sRGB primaries matrix below.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.00000;
constexpr double kWhiteZ = 1.08883;

constexpr double kLabEps = 216.0 / 24389.0;  // (6/29)^3
constexpr double kLabKappa = 24389.0 / 27.0; // (29/3)^3

inline double lab_f(double t) {
    return (t > kLabEps) ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

inline double lab_f_inv(double ft) {
    const double cube = ft * ft * ft;
    return (cube > kLabEps) ? cube : (116.0 * ft - 16.0) / kLabKappa;
}

} // namespace detail

inline LabPixel rgb_to_lab_pixel(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const auto& dec = detail::srgb_decode_table();
    const double r = dec[r8], g = dec[g8], b = dec[b8];

    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    const double fx = detail::lab_f(x / detail::kWhiteX);
    const double fy = detail::lab_f(y / detail::kWhiteY);
    const double fz = detail::lab_f(z / detail::kWhiteZ);

    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline void lab_to_rgb_pixel(const LabPixel& p, std::uint8_t& r8, std::uint8_t& g8, std::uint8_t& b8) {
    const double fy = (p.L + 16.0) / 116.0;
    const double fx = fy + p.a / 500.0;
    const double fz = fy - p.b / 200.0;

    const double x = detail::lab_f_inv(fx) * detail::kWhiteX;
    const double y = detail::lab_f_inv(fy) * detail::kWhiteY;
    const double z = detail::lab_f_inv(fz) * detail::kWhiteZ;

    const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;

    // Out-of-gamut values clamp; no wraparound.
    r8 = store_u8(detail::srgb_encode(std::clamp(r, 0.0, 1.0)) * 255.0);
    g8 = store_u8(detail::srgb_encode(std::clamp(g, 0.0, 1.0)) * 255.0);
    b8 = store_u8(detail::srgb_encode(std::clamp(b, 0.0, 1.0)) * 255.0);
}

// Standard sRGB -> XYZ(D65) -> L*a*b* per pixel. Alpha, when present, is
// simply not part of the plane; callers keep it on the source image.
inline LabImage rgb_to_lab(const ImageBuffer& img) {
    if (img.channels < 3)
        throw std::invalid_argument("rgb_to_lab: image must have at least 3 channels");
    LabImage out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    const std::size_t n = out.pixels.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* px = img.data.data() + i * img.channels;
        out.pixels[i] = rgb_to_lab_pixel(px[0], px[1], px[2]);
    }
    return out;
}

// Inverse of rgb_to_lab with clamping to [0,255]; always produces RGB.
inline ImageBuffer lab_to_rgb(const LabImage& lab) {
    ImageBuffer out(lab.width, lab.height, 3);
    const std::size_t n = lab.pixels.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t* px = out.data.data() + i * 3;
        lab_to_rgb_pixel(lab.pixels[i], px[0], px[1], px[2]);
    }
    return out;
}

} // namespace maskbench
