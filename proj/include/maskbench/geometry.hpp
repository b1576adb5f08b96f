#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/image.hpp"

namespace maskbench {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

inline double norm(Point p) { return std::hypot(p.x, p.y); }

// The standard 68-point facial annotation: jawline 0-16, brows 17-26,
// nose 27-35, eyes 36-47, mouth 48-67. Coordinates are pixel positions
// with integer coordinates at pixel centers.
struct LandmarkSet {
    static constexpr int kPointCount = 68;
    std::array<Point, kPointCount> points{};

    Point& operator[](int i) { return points[static_cast<std::size_t>(i)]; }
    const Point& operator[](int i) const { return points[static_cast<std::size_t>(i)]; }

    // Distance between the mean right-eye (36-41) and left-eye (42-47) points.
    double interocular_distance() const {
        Point r{0, 0}, l{0, 0};
        for (int i = 36; i <= 41; ++i) r = r + points[i];
        for (int i = 42; i <= 47; ++i) l = l + points[i];
        return norm(r * (1.0 / 6.0) - l * (1.0 / 6.0));
    }

    void validate() const {
        for (const Point& p : points)
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw std::invalid_argument("LandmarkSet: non-finite coordinate");
        if (!(interocular_distance() > 0.0))
            throw std::invalid_argument("LandmarkSet: interocular distance must be positive");
    }
};

struct Triangle {
    int a = 0, b = 0, c = 0;
    bool operator==(const Triangle&) const = default;
};

// Triangle strip (i, i+1, i+2) over an ordered point list; n points yield
// n-2 triangles, consecutive triangles share an edge.
inline std::vector<Triangle> strip_triangulate(int point_count) {
    if (point_count < 3)
        throw std::invalid_argument("strip_triangulate: need at least 3 points, got " +
                                    std::to_string(point_count));
    std::vector<Triangle> tris;
    tris.reserve(static_cast<std::size_t>(point_count) - 2);
    for (int i = 0; i + 2 < point_count; ++i)
        tris.push_back({i, i + 1, i + 2});
    return tris;
}

// 2x3 affine [a b tx; c d ty] mapping (x,y) -> (a x + b y + tx, c x + d y + ty).
struct AffineMatrix {
    double a = 1, b = 0, tx = 0;
    double c = 0, d = 1, ty = 0;

    Point apply(Point p) const {
        return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty};
    }
};

inline double signed_area2(Point p0, Point p1, Point p2) {
    return (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
}

inline double triangle_area(Point p0, Point p1, Point p2) {
    return 0.5 * std::abs(signed_area2(p0, p1, p2));
}

// Exact solve of the six-unknown system mapping src_i -> dst_i.
inline AffineMatrix estimate_affine(const std::array<Point, 3>& src,
                                    const std::array<Point, 3>& dst) {
    const double det = signed_area2(src[0], src[1], src[2]);
    if (std::abs(det) <= 2e-6)
        throw DegenerateGeometryError("estimate_affine: source triangle is collinear (area " +
                                      std::to_string(std::abs(det) * 0.5) + " px^2)");

    const double sx1 = src[1].x - src[0].x, sy1 = src[1].y - src[0].y;
    const double sx2 = src[2].x - src[0].x, sy2 = src[2].y - src[0].y;
    const double dx1 = dst[1].x - dst[0].x, dy1 = dst[1].y - dst[0].y;
    const double dx2 = dst[2].x - dst[0].x, dy2 = dst[2].y - dst[0].y;

    AffineMatrix m;
    m.a = (dx1 * sy2 - dx2 * sy1) / det;
    m.b = (dx2 * sx1 - dx1 * sx2) / det;
    m.c = (dy1 * sy2 - dy2 * sy1) / det;
    m.d = (dy2 * sx1 - dy1 * sx2) / det;
    m.tx = dst[0].x - m.a * src[0].x - m.b * src[0].y;
    m.ty = dst[0].y - m.c * src[0].x - m.d * src[0].y;
    return m;
}

namespace detail {

// Edge function sign for the rasterizer: > 0 means p is on the interior side
// of directed edge a->b for a triangle wound so that signed_area2 > 0.
inline double edge_function(Point a, Point b, Point p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// Top-left tie rule for the winding normalized above (y grows downward):
// a horizontal edge running +x is a top edge, an edge running -y is a left
// edge. An edge shared by two triangles is claimed by exactly one of them.
inline bool edge_is_top_left(Point a, Point b) {
    if (a.y == b.y) return b.x > a.x;
    return b.y < a.y;
}

} // namespace detail

// Pixel-center-inside test with the top-left rule, so adjacent triangles
// partition pixels exactly once. Vertices are in the same integer-center
// pixel coordinates as the landmark convention.
inline bool point_in_triangle(Point p, Point v0, Point v1, Point v2) {
    if (signed_area2(v0, v1, v2) < 0.0)
        std::swap(v1, v2);
    const Point verts[3] = {v0, v1, v2};
    for (int i = 0; i < 3; ++i) {
        const Point a = verts[i];
        const Point b = verts[(i + 1) % 3];
        const double e = detail::edge_function(a, b, p);
        if (e < 0.0) return false;
        if (e == 0.0 && !detail::edge_is_top_left(a, b)) return false;
    }
    return true;
}

namespace detail {

// Bilinear RGBA fetch with zero padding: taps outside the raster contribute
// transparent black, so fully out-of-bounds samples come back with alpha 0.
inline std::array<double, 4> sample_bilinear_rgba(const ImageBuffer& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;

    std::array<double, 4> acc{0, 0, 0, 0};
    const double wx[2] = {1.0 - fx, fx};
    const double wy[2] = {1.0 - fy, fy};
    for (int dy = 0; dy < 2; ++dy) {
        const int sy = y0 + dy;
        if (sy < 0 || sy >= img.height) continue;
        for (int dx = 0; dx < 2; ++dx) {
            const int sx = x0 + dx;
            if (sx < 0 || sx >= img.width) continue;
            const double w = wx[dx] * wy[dy];
            if (w == 0.0) continue;
            const std::uint8_t* px = img.data.data() + img.offset(sx, sy);
            for (int c = 0; c < 4; ++c) acc[c] += w * px[c];
        }
    }
    return acc;
}

} // namespace detail

// Inverse-maps every destination pixel whose center lies inside dst_tri
// through the affine dst_tri -> src_tri and bilinearly samples src. Pixels
// outside dst_tri are untouched. A collapsed dst_tri skips the patch and
// returns false instead of failing, since perturbation can fold a triangle.
inline bool warp_triangle(const ImageBuffer& src, ImageBuffer& dst,
                          const std::array<Point, 3>& src_tri,
                          const std::array<Point, 3>& dst_tri) {
    if (src.channels != 4 || dst.channels != 4)
        throw std::invalid_argument("warp_triangle: src and dst must be RGBA");
    if (std::abs(signed_area2(dst_tri[0], dst_tri[1], dst_tri[2])) <= 2e-6)
        return false;

    const AffineMatrix inv = estimate_affine(dst_tri, src_tri);

    const double min_x = std::min({dst_tri[0].x, dst_tri[1].x, dst_tri[2].x});
    const double max_x = std::max({dst_tri[0].x, dst_tri[1].x, dst_tri[2].x});
    const double min_y = std::min({dst_tri[0].y, dst_tri[1].y, dst_tri[2].y});
    const double max_y = std::max({dst_tri[0].y, dst_tri[1].y, dst_tri[2].y});

    const int x_begin = std::max(0, static_cast<int>(std::ceil(min_x - 1.0)));
    const int x_end = std::min(dst.width - 1, static_cast<int>(std::floor(max_x + 1.0)));
    const int y_begin = std::max(0, static_cast<int>(std::ceil(min_y - 1.0)));
    const int y_end = std::min(dst.height - 1, static_cast<int>(std::floor(max_y + 1.0)));

    for (int y = y_begin; y <= y_end; ++y) {
        for (int x = x_begin; x <= x_end; ++x) {
            const Point p{static_cast<double>(x), static_cast<double>(y)};
            if (!point_in_triangle(p, dst_tri[0], dst_tri[1], dst_tri[2]))
                continue;
            const Point s = inv.apply(p);
            const auto rgba = detail::sample_bilinear_rgba(src, s.x, s.y);
            std::uint8_t* out = dst.data.data() + dst.offset(x, y);
            for (int c = 0; c < 4; ++c) out[c] = store_u8(rgba[c]);
        }
    }
    return true;
}

// Pairs 16 face-landmark indices with 16 mask-template pixel positions.
// The strip triangulation of either side yields 14 patches.
struct CorrespondenceSet {
    static constexpr int kPointCount = 16;
    std::array<int, kPointCount> face_indices{};
    std::array<Point, kPointCount> mask_points{};

    std::array<Point, kPointCount> face_points(const LandmarkSet& landmarks) const {
        std::array<Point, kPointCount> pts{};
        for (int i = 0; i < kPointCount; ++i)
            pts[static_cast<std::size_t>(i)] = landmarks[face_indices[static_cast<std::size_t>(i)]];
        return pts;
    }
};

// Default face-side anchor order. The strip zig-zags between the left jaw
// chain (1..7) and the right jaw chain (14..8), led by nose bridge 28 and
// nose tip 30, so the 14 patches tile the lower face without holes:
//   28, 30, 1, 14, 2, 13, 3, 12, 4, 11, 5, 10, 6, 9, 7, 8
inline std::array<int, 16> default_face_indices() {
    return {28, 30, 1, 14, 2, 13, 3, 12, 4, 11, 5, 10, 6, 9, 7, 8};
}

// Maps a coordinate between raster sizes consistently with the bilinear
// resize convention (pixel centers at integers).
inline double map_coordinate(double v, int from_size, int to_size) {
    return (v + 0.5) * (static_cast<double>(to_size) / from_size) - 0.5;
}

inline LandmarkSet scale_landmarks(const LandmarkSet& lm, int from_w, int from_h,
                                   int to_w, int to_h) {
    LandmarkSet out = lm;
    for (Point& p : out.points) {
        p.x = map_coordinate(p.x, from_w, to_w);
        p.y = map_coordinate(p.y, from_h, to_h);
    }
    return out;
}

// A generated frontal 68-point layout for a 250x250 face, used as the
// validation fixture for mask templates and as the base of synthetic faces.
inline LandmarkSet canonical_frontal_landmarks() {
    constexpr double kPi = 3.14159265358979323846;
    LandmarkSet lm;
    // jaw 0-16: ellipse arc ear to ear through the chin
    for (int i = 0; i <= 16; ++i) {
        const double t = kPi * i / 16.0;
        lm[i] = {125.0 - 85.0 * std::cos(t), 100.0 + 95.0 * std::sin(t)};
    }
    // brows 17-26
    for (int k = 0; k <= 4; ++k) {
        const double arc = 5.0 * std::sin(kPi * k / 4.0);
        lm[17 + k] = {58.0 + 12.5 * k, 88.0 - arc};
        lm[22 + k] = {142.0 + 12.5 * k, 88.0 - arc};
    }
    // nose bridge 27-30 and nostril row 31-35
    for (int k = 0; k <= 3; ++k)
        lm[27 + k] = {125.0, 104.0 + 13.0 * k};
    for (int k = 0; k <= 4; ++k)
        lm[31 + k] = {107.0 + 9.0 * k, 152.0};
    // eyes 36-47: hexagons around the eye centers
    const double ex[6] = {-13.0, -6.0, 6.0, 13.0, 6.0, -6.0};
    const double ey[6] = {0.0, -5.0, -5.0, 0.0, 5.0, 5.0};
    for (int k = 0; k < 6; ++k) {
        lm[36 + k] = {87.0 + ex[k], 105.0 + ey[k]};
        lm[42 + k] = {163.0 + ex[k], 105.0 + ey[k]};
    }
    // mouth 48-59 outer, 60-67 inner
    for (int k = 0; k < 12; ++k) {
        const double theta = kPi - kPi * k / 6.0;
        lm[48 + k] = {125.0 + 23.0 * std::cos(theta), 172.0 - 10.0 * std::sin(theta)};
    }
    for (int k = 0; k < 8; ++k) {
        const double theta = kPi - kPi * k / 4.0;
        lm[60 + k] = {125.0 + 12.0 * std::cos(theta), 172.0 - 4.0 * std::sin(theta)};
    }
    return lm;
}

struct SkippedTriangle {
    int index = 0;
    std::string reason;
};

struct WarpMaskResult {
    ImageBuffer layer;                      // RGBA canvas of the requested size
    std::vector<SkippedTriangle> skipped;   // collapsed patches, at most 4
};

// Projects the mask raster onto the face: the 14 strip patches are warped in
// order onto a transparent canvas. Collapsed patches (either side) are
// skipped with a warning; more than 4 skips abandon the generation.
inline WarpMaskResult warp_mask(const ImageBuffer& mask_raster,
                                const CorrespondenceSet& correspondence,
                                const LandmarkSet& face_landmarks,
                                int target_w, int target_h) {
    if (mask_raster.channels != 4)
        throw std::invalid_argument("warp_mask: mask raster must be RGBA");

    WarpMaskResult result{ImageBuffer(target_w, target_h, 4, 0), {}};
    const auto face_pts = correspondence.face_points(face_landmarks);
    const auto& mask_pts = correspondence.mask_points;
    const auto triangles = strip_triangulate(CorrespondenceSet::kPointCount);

    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const Triangle tri = triangles[t];
        const std::array<Point, 3> src_tri{mask_pts[tri.a], mask_pts[tri.b], mask_pts[tri.c]};
        const std::array<Point, 3> dst_tri{face_pts[tri.a], face_pts[tri.b], face_pts[tri.c]};

        const bool src_flat = std::abs(signed_area2(src_tri[0], src_tri[1], src_tri[2])) <= 2e-6;
        const bool dst_flat = std::abs(signed_area2(dst_tri[0], dst_tri[1], dst_tri[2])) <= 2e-6;
        if (src_flat || dst_flat) {
            result.skipped.push_back({static_cast<int>(t),
                                      std::string(src_flat ? "mask" : "face") +
                                          "-side triangle collapsed"});
            if (result.skipped.size() > 4)
                throw GenerationFailedError(
                    "warp_mask: " + std::to_string(result.skipped.size()) +
                    " collapsed patches, mask too distorted");
            continue;
        }
        warp_triangle(mask_raster, result.layer, src_tri, dst_tri);
    }
    return result;
}

} // namespace maskbench
