#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "maskbench/blur.hpp"
#include "maskbench/color.hpp"
#include "maskbench/error.hpp"
#include "maskbench/gallery.hpp"
#include "maskbench/geometry.hpp"
#include "maskbench/image.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {

// Pipeline parameters. Defaults are the reference configuration:
// work at 500x500, lightness weight 0.6, boundary kernel 5, emit 250x250.
struct ComposeParams {
    int target_side = 500;        // working resolution for warp and blend
    double alpha = 0.6;           // lightness weight in [0,1]
    int beta = 5;                 // odd boundary-blur kernel size
    double perturb_face_top = 0.1; // fraction of interocular distance
    double perturb_mask_top = 0.1; // fraction of mask bounding-box height
    std::uint64_t seed = 0;
    int output_side = 250;

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("ComposeParams: alpha must be in [0,1]");
        if (beta < 1 || beta % 2 == 0)
            throw std::invalid_argument("ComposeParams: beta must be odd and >= 1");
        if (target_side < 1 || output_side < 1 || target_side < output_side)
            throw std::invalid_argument("ComposeParams: need target_side >= output_side >= 1");
        if (perturb_face_top < 0.0 || perturb_mask_top < 0.0)
            throw std::invalid_argument("ComposeParams: perturbation magnitudes must be >= 0");
    }
};

struct MaskedFaceResult {
    ImageBuffer image;           // RGB, output_side x output_side
    ImageBuffer footprint;       // single channel, re-binarized mask coverage
    std::string template_id;
    Point face_offset{0, 0};     // applied top-of-face perturbation
    Point mask_offset{0, 0};     // applied top-of-mask perturbation
    std::vector<std::string> warnings;
};

namespace detail {

// Uniform draw from a disk of the given radius: angle uniform, radius
// sqrt-transformed so density is uniform over the area.
inline Point draw_in_disk(Rng& rng, double radius) {
    const double angle = rng.next_double() * 2.0 * 3.14159265358979323846;
    const double r = radius * std::sqrt(rng.next_double());
    return {r * std::cos(angle), r * std::sin(angle)};
}

} // namespace detail

struct PerturbResult {
    LandmarkSet landmarks;
    std::array<Point, CorrespondenceSet::kPointCount> mask_points;
    Point face_offset{0, 0};
    Point mask_offset{0, 0};
};

// Jitters the top-of-face anchor (the first face correspondence index,
// nose bridge 28 by default) and the top-of-mask point (mask point 0).
// Offsets are bounded by the params fractions of interocular distance and
// mask bounding-box height respectively. Face draw happens first.
inline PerturbResult perturb_landmarks(const LandmarkSet& face_landmarks,
                                       const CorrespondenceSet& correspondence,
                                       const ComposeParams& params, Rng& rng) {
    PerturbResult out{face_landmarks, correspondence.mask_points, {0, 0}, {0, 0}};

    if (params.perturb_face_top > 0.0) {
        const double radius = params.perturb_face_top * face_landmarks.interocular_distance();
        out.face_offset = detail::draw_in_disk(rng, radius);
        const int anchor = correspondence.face_indices[0];
        out.landmarks[anchor] = out.landmarks[anchor] + out.face_offset;
    }
    if (params.perturb_mask_top > 0.0) {
        double min_y = correspondence.mask_points[0].y, max_y = min_y;
        for (const Point& p : correspondence.mask_points) {
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
        const double radius = params.perturb_mask_top * (max_y - min_y);
        out.mask_offset = detail::draw_in_disk(rng, radius);
        out.mask_points[0] = out.mask_points[0] + out.mask_offset;
    }
    return out;
}

// Mean L over the center facial region of the unmasked face: the bounding
// box of nose landmarks 27-35 expanded by 20% on each side, clipped to the
// image. Pixels from the mask never contaminate this statistic.
inline double center_region_mean_L(const ImageBuffer& face, const LandmarkSet& landmarks) {
    double x0 = landmarks[27].x, x1 = x0, y0 = landmarks[27].y, y1 = y0;
    for (int i = 27; i <= 35; ++i) {
        x0 = std::min(x0, landmarks[i].x);
        x1 = std::max(x1, landmarks[i].x);
        y0 = std::min(y0, landmarks[i].y);
        y1 = std::max(y1, landmarks[i].y);
    }
    const double ex = 0.2 * (x1 - x0), ey = 0.2 * (y1 - y0);
    const int px0 = std::max(0, static_cast<int>(std::ceil(x0 - ex)));
    const int px1 = std::min(face.width - 1, static_cast<int>(std::floor(x1 + ex)));
    const int py0 = std::max(0, static_cast<int>(std::ceil(y0 - ey)));
    const int py1 = std::min(face.height - 1, static_cast<int>(std::floor(y1 + ey)));
    if (px0 > px1 || py0 > py1)
        throw DegenerateGeometryError("center_region_mean_L: region lies outside the image");

    double sum = 0.0;
    std::size_t count = 0;
    for (int y = py0; y <= py1; ++y) {
        for (int x = px0; x <= px1; ++x) {
            const std::uint8_t* px = face.data.data() + face.offset(x, y);
            sum += rgb_to_lab_pixel(px[0], px[1], px[2]).L;
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

// Shifts the mask's mean L toward the face mean by weight alpha while
// preserving per-pixel contrast: L' = L + alpha * (face_mean_L - mask_mean_L)
// on footprint pixels (alpha plane > 0), clamped to [0,100]. a and b stay.
inline ImageBuffer adjust_mask_lightness(const ImageBuffer& composited,
                                         const ImageBuffer& footprint,
                                         double face_mean_L, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("adjust_mask_lightness: alpha must be in [0,1]");
    if (!composited.same_size(footprint) || footprint.channels != 1)
        throw std::invalid_argument("adjust_mask_lightness: footprint must be a matching alpha plane");
    if (alpha == 0.0)
        return composited;

    const std::size_t n = static_cast<std::size_t>(composited.width) * composited.height;
    std::vector<LabPixel> lab(n);
    double mask_sum = 0.0;
    std::size_t mask_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (footprint.data[i] == 0) continue;
        const std::uint8_t* px = composited.data.data() + i * composited.channels;
        lab[i] = rgb_to_lab_pixel(px[0], px[1], px[2]);
        mask_sum += lab[i].L;
        ++mask_count;
    }
    if (mask_count == 0)
        return composited;

    const double shift = alpha * (face_mean_L - mask_sum / static_cast<double>(mask_count));
    if (shift == 0.0)
        return composited;

    ImageBuffer out = composited;
    for (std::size_t i = 0; i < n; ++i) {
        if (footprint.data[i] == 0) continue;
        LabPixel p = lab[i];
        p.L = std::clamp(p.L + shift, 0.0, 100.0);
        std::uint8_t* px = out.data.data() + i * out.channels;
        lab_to_rgb_pixel(p, px[0], px[1], px[2]);
    }
    return out;
}

namespace detail {

// Binary edge of the footprint at alpha threshold 128: pixels whose
// binarized value differs from an 8-neighbor.
inline std::vector<std::uint8_t> footprint_edge(const ImageBuffer& footprint) {
    const int w = footprint.width, h = footprint.height;
    std::vector<std::uint8_t> edge(static_cast<std::size_t>(w) * h, 0);
    auto bin = [&](int x, int y) { return footprint.data[static_cast<std::size_t>(y) * w + x] >= 128; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool b = bin(x, y);
            bool boundary = false;
            for (int dy = -1; dy <= 1 && !boundary; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (bin(nx, ny) != b) {
                        boundary = true;
                        break;
                    }
                }
            }
            if (boundary) edge[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }
    return edge;
}

// Chebyshev dilation by r steps of 8-neighbor growth.
inline void dilate_chebyshev(std::vector<std::uint8_t>& mask, int w, int h, int r) {
    for (int step = 0; step < r; ++step) {
        std::vector<std::uint8_t> next = mask;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (mask[static_cast<std::size_t>(y) * w + x]) continue;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (mask[static_cast<std::size_t>(ny) * w + nx]) {
                            next[static_cast<std::size_t>(y) * w + x] = 1;
                            goto grown;
                        }
                    }
                }
            grown:;
            }
        }
        mask = std::move(next);
    }
}

} // namespace detail

// The band of pixels within Chebyshev distance (beta-1)/2 of the footprint's
// binary edge. Marked 1 in the returned plane.
inline std::vector<std::uint8_t> boundary_band(const ImageBuffer& footprint, int beta) {
    if (beta < 1 || beta % 2 == 0)
        throw std::invalid_argument("boundary_band: beta must be odd and >= 1");
    if (beta == 1)
        return std::vector<std::uint8_t>(
            static_cast<std::size_t>(footprint.width) * footprint.height, 0);
    auto band = detail::footprint_edge(footprint);
    detail::dilate_chebyshev(band, footprint.width, footprint.height, (beta - 1) / 2);
    return band;
}

// Gaussian-blurs only the boundary band between mask and face; pixels
// outside the band are returned exactly as given.
inline ImageBuffer blur_boundary(const ImageBuffer& img, const ImageBuffer& footprint, int beta) {
    if (!img.same_size(footprint) || footprint.channels != 1)
        throw std::invalid_argument("blur_boundary: footprint must be a matching alpha plane");
    const auto band = boundary_band(footprint, beta);
    if (std::find(band.begin(), band.end(), std::uint8_t{1}) == band.end())
        return img;

    const ImageBuffer blurred = gaussian_blur(img, beta);
    ImageBuffer out = img;
    const std::size_t n = band.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!band[i]) continue;
        for (int c = 0; c < img.channels; ++c)
            out.data[i * img.channels + c] = blurred.data[i * img.channels + c];
    }
    return out;
}

// The full pipeline: upscale, perturb, warp, blend, lightness-match,
// boundary-blur, downscale. Pure function of its inputs including the seed.
inline MaskedFaceResult apply_mask(const ImageBuffer& face, const LandmarkSet& landmarks,
                                   const MaskTemplate& tmpl, const ComposeParams& params) {
    params.validate();
    if (face.channels != 3)
        throw std::invalid_argument("apply_mask: face image must be RGB");
    landmarks.validate();

    const int side = params.target_side;
    Rng rng(params.seed);

    // (1) work at the enlarged resolution to reduce aliasing
    const ImageBuffer face_big = resize_bilinear(face, side, side);
    const LandmarkSet lm_big = scale_landmarks(landmarks, face.width, face.height, side, side);

    // (2) seeded jitter of the top anchors
    const PerturbResult jitter = perturb_landmarks(lm_big, tmpl.correspondence, params, rng);
    CorrespondenceSet corr = tmpl.correspondence;
    corr.mask_points = jitter.mask_points;

    // (3) warped mask layer
    WarpMaskResult warped = warp_mask(tmpl.raster, corr, jitter.landmarks, side, side);

    // (4) alpha blend onto the face
    const ImageBuffer blended = composite_alpha(warped.layer, face_big);
    const ImageBuffer footprint_big = alpha_plane(warped.layer);

    // (5) lightness matching against the original, unmasked face
    const double face_mean = center_region_mean_L(face, landmarks);
    const ImageBuffer adjusted = adjust_mask_lightness(blended, footprint_big, face_mean, params.alpha);

    // (6) soften the mask/face boundary
    const ImageBuffer softened = blur_boundary(adjusted, footprint_big, params.beta);

    // (7) emit at output resolution; footprint re-binarized at 128
    MaskedFaceResult result;
    result.image = resize_bilinear(softened, params.output_side, params.output_side);
    ImageBuffer fp_small = resize_bilinear(footprint_big, params.output_side, params.output_side);
    for (std::uint8_t& v : fp_small.data) v = (v >= 128) ? 255 : 0;
    result.footprint = std::move(fp_small);
    result.template_id = tmpl.id;
    result.face_offset = jitter.face_offset;
    result.mask_offset = jitter.mask_offset;
    for (const SkippedTriangle& s : warped.skipped)
        result.warnings.push_back("patch " + std::to_string(s.index) + " skipped: " + s.reason);

    std::size_t covered = 0;
    for (std::uint8_t v : result.footprint.data)
        if (v) ++covered;
    const std::size_t area = result.footprint.data.size();
    if (covered * 50 < area) // footprint below 2% of the image
        throw GenerationFailedError("apply_mask: footprint covers " + std::to_string(covered) +
                                    " of " + std::to_string(area) + " pixels (< 2%)");
    return result;
}

} // namespace maskbench
