#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "maskbench/gallery.hpp"
#include "maskbench/geometry.hpp"
#include "maskbench/image.hpp"
#include "maskbench/rng.hpp"

// Procedurally drawn faces and mask templates. These stand in for real
// photographs and real mask artwork so the tool can be exercised, tested
// and demoed without redistributing any face dataset.

namespace maskbench::synthetic {

namespace detail {

// Cheap deterministic per-pixel hash for texture noise.
inline double pixel_noise(std::uint64_t seed, int x, int y) {
    std::uint64_t h = seed ^ (static_cast<std::uint64_t>(x) * 0x9e3779b97f4a7c15ull) ^
                      (static_cast<std::uint64_t>(y) * 0xc2b2ae3d27d4eb4full);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<double>(h >> 11) * 0x1.0p-53; // [0,1)
}

inline bool in_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
    const double dx = (x - cx) / rx, dy = (y - cy) / ry;
    return dx * dx + dy * dy <= 1.0;
}

} // namespace detail

// The 16 default mask-template annotation points for a raster of the given
// size, in the same order as default_face_indices(): top-center (nose
// bridge), upper-center (nose tip), then alternating left/right edge points
// descending, ending with the bottom-center pair (chin).
inline std::array<Point, 16> template_points(int width, int height) {
    const double w = width - 1.0, h = height - 1.0;
    auto at = [&](double fx, double fy) { return Point{fx * w, fy * h}; };
    return {
        at(0.50, 0.02), // nose bridge
        at(0.50, 0.26), // nose tip
        at(0.02, 0.10), at(0.98, 0.10), // cheek top corners
        at(0.03, 0.32), at(0.97, 0.32),
        at(0.06, 0.54), at(0.94, 0.54),
        at(0.12, 0.74), at(0.88, 0.74),
        at(0.22, 0.88), at(0.78, 0.88),
        at(0.34, 0.96), at(0.66, 0.96),
        at(0.44, 0.99), at(0.56, 0.99), // chin pair
    };
}

enum class TemplateStyle { solid, striped, gradient, pleated };

// Draws a mask template: alpha 255 exactly on the strip coverage of the
// annotation points, 0 elsewhere, with a style-dependent RGB fill.
inline MaskTemplate make_template(const std::string& id, TemplateStyle style,
                                  std::uint8_t base_r, std::uint8_t base_g, std::uint8_t base_b,
                                  int width = 360, int height = 260) {
    MaskTemplate tmpl;
    tmpl.id = id;
    tmpl.raster = ImageBuffer(width, height, 4, 0);
    tmpl.correspondence.face_indices = default_face_indices();
    tmpl.correspondence.mask_points = template_points(width, height);

    const auto triangles = strip_triangulate(CorrespondenceSet::kPointCount);
    const auto& pts = tmpl.correspondence.mask_points;

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Point p{static_cast<double>(x), static_cast<double>(y)};
            bool inside = false;
            for (const Triangle& t : triangles) {
                if (point_in_triangle(p, pts[t.a], pts[t.b], pts[t.c])) {
                    inside = true;
                    break;
                }
            }
            if (!inside) continue;

            double r = base_r, g = base_g, b = base_b;
            switch (style) {
            case TemplateStyle::solid:
                break;
            case TemplateStyle::striped: {
                if (((x + y) / 14) % 2 == 0) {
                    r *= 0.72;
                    g *= 0.72;
                    b *= 0.72;
                }
                break;
            }
            case TemplateStyle::gradient: {
                const double f = 0.6 + 0.4 * (1.0 - static_cast<double>(y) / height);
                r *= f;
                g *= f;
                b *= f;
                break;
            }
            case TemplateStyle::pleated: {
                const double band = std::sin(3.0 * 3.14159265358979323846 * y / height);
                const double f = 0.85 + 0.15 * band;
                r *= f;
                g *= f;
                b *= f;
                break;
            }
            }
            std::uint8_t* px = tmpl.raster.data.data() + tmpl.raster.offset(x, y);
            px[0] = store_u8(r);
            px[1] = store_u8(g);
            px[2] = store_u8(b);
            px[3] = 255;
        }
    }
    return tmpl;
}

// The four-template fixture gallery bundled with the repository.
inline std::vector<MaskTemplate> fixture_gallery() {
    std::vector<MaskTemplate> gallery;
    gallery.push_back(make_template("surgical_blue", TemplateStyle::pleated, 116, 173, 209));
    gallery.back().style_tags = {"surgical", "pleated"};
    gallery.push_back(make_template("cloth_striped", TemplateStyle::striped, 196, 94, 88));
    gallery.back().style_tags = {"cloth", "striped"};
    gallery.push_back(make_template("gradient_gray", TemplateStyle::gradient, 190, 190, 196));
    gallery.back().style_tags = {"cloth", "gradient"};
    gallery.push_back(make_template("n95_white", TemplateStyle::solid, 238, 236, 228));
    gallery.back().style_tags = {"respirator", "solid"};
    return gallery;
}

// Landmarks for a synthetic identity: the canonical frontal layout with a
// seeded per-identity jitter, valid for a face_size x face_size image.
inline LandmarkSet identity_landmarks(std::uint64_t identity_seed, int face_size = 250) {
    Rng rng(derive_seed(identity_seed, "landmarks"));
    LandmarkSet lm = canonical_frontal_landmarks();
    const double shift_x = (rng.next_double() - 0.5) * 10.0;
    const double shift_y = (rng.next_double() - 0.5) * 8.0;
    const double scale = 0.94 + rng.next_double() * 0.10;
    for (Point& p : lm.points) {
        p.x = 125.0 + (p.x - 125.0) * scale + shift_x + (rng.next_double() - 0.5) * 2.0;
        p.y = 145.0 + (p.y - 145.0) * scale + shift_y + (rng.next_double() - 0.5) * 2.0;
    }
    if (face_size != 250)
        lm = scale_landmarks(lm, 250, 250, face_size, face_size);
    return lm;
}

// A shaded synthetic face matching identity_landmarks: gradient background,
// skin-tone head ellipse, eye/brow/mouth features and a per-image texture.
inline ImageBuffer synth_face(std::uint64_t identity_seed, std::uint64_t image_seed,
                              int face_size = 250) {
    Rng id_rng(derive_seed(identity_seed, "skin"));
    const double skin_r = 150.0 + id_rng.next_double() * 80.0;
    const double skin_g = skin_r * (0.72 + id_rng.next_double() * 0.14);
    const double skin_b = skin_g * (0.70 + id_rng.next_double() * 0.16);
    const double bg_base = 40.0 + id_rng.next_double() * 60.0;

    const LandmarkSet lm = identity_landmarks(identity_seed, face_size);
    const double cx = (lm[0].x + lm[16].x) / 2.0;
    const double cy = lm[27].y;
    const double head_rx = (lm[16].x - lm[0].x) * 0.58;
    const double head_ry = (lm[8].y - cy) * 0.92;

    const std::uint64_t tex_seed = derive_seed(image_seed, "texture");
    ImageBuffer img(face_size, face_size, 3);

    for (int y = 0; y < face_size; ++y) {
        for (int x = 0; x < face_size; ++x) {
            double r, g, b;
            if (detail::in_ellipse(x, y, cx, cy - head_ry * 0.35, head_rx, head_ry * 1.35)) {
                // radial shading toward the head border
                const double dx = (x - cx) / head_rx, dy = (y - (cy - head_ry * 0.35)) / (head_ry * 1.35);
                const double f = 1.0 - 0.25 * (dx * dx + dy * dy);
                r = skin_r * f;
                g = skin_g * f;
                b = skin_b * f;
            } else {
                const double f = bg_base + 40.0 * y / face_size;
                r = f * 0.8;
                g = f * 0.9;
                b = f * 1.1;
            }
            const double noise = (detail::pixel_noise(tex_seed, x, y) - 0.5) * 12.0;
            std::uint8_t* px = img.data.data() + img.offset(x, y);
            px[0] = store_u8(r + noise);
            px[1] = store_u8(g + noise);
            px[2] = store_u8(b + noise);
        }
    }

    auto fill_ellipse = [&](double ecx, double ecy, double rx, double ry, double er, double eg,
                            double eb) {
        const int x0 = std::max(0, static_cast<int>(ecx - rx - 1));
        const int x1 = std::min(face_size - 1, static_cast<int>(ecx + rx + 1));
        const int y0 = std::max(0, static_cast<int>(ecy - ry - 1));
        const int y1 = std::min(face_size - 1, static_cast<int>(ecy + ry + 1));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (detail::in_ellipse(x, y, ecx, ecy, rx, ry)) {
                    std::uint8_t* px = img.data.data() + img.offset(x, y);
                    px[0] = store_u8(er);
                    px[1] = store_u8(eg);
                    px[2] = store_u8(eb);
                }
    };

    const double eye_w = norm(lm[39] - lm[36]) / 2.0;
    Point re{0, 0}, le{0, 0};
    for (int i = 36; i <= 41; ++i) re = re + lm[i] * (1.0 / 6.0);
    for (int i = 42; i <= 47; ++i) le = le + lm[i] * (1.0 / 6.0);
    fill_ellipse(re.x, re.y, eye_w, eye_w * 0.45, 60, 45, 40);
    fill_ellipse(le.x, le.y, eye_w, eye_w * 0.45, 60, 45, 40);
    fill_ellipse(re.x, re.y - eye_w * 1.1, eye_w * 1.3, eye_w * 0.25, 80, 60, 50);
    fill_ellipse(le.x, le.y - eye_w * 1.1, eye_w * 1.3, eye_w * 0.25, 80, 60, 50);

    Point mouth{0, 0};
    for (int i = 48; i < 60; ++i) mouth = mouth + lm[i] * (1.0 / 12.0);
    const double mouth_w = norm(lm[54] - lm[48]) / 2.0;
    fill_ellipse(mouth.x, mouth.y, mouth_w, mouth_w * 0.4, 165, 90, 90);
    // nose ridge
    fill_ellipse(lm[30].x, lm[30].y, 6.0, 10.0, skin_r * 0.85, skin_g * 0.85, skin_b * 0.85);

    return img;
}

} // namespace maskbench::synthetic
