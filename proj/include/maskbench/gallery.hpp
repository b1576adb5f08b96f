#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/error.hpp"
#include "maskbench/geometry.hpp"
#include "maskbench/image.hpp"
#include "maskbench/io.hpp"

namespace maskbench {

// An RGBA mask raster plus the 16 ordered correspondence points that bind
// it to face landmarks.
struct MaskTemplate {
    std::string id;
    ImageBuffer raster;
    CorrespondenceSet correspondence;
    std::vector<std::string> style_tags;
};

struct Finding {
    enum class Severity { warning, error };
    Severity severity = Severity::error;
    std::string message;
};

// Checks all template invariants. An empty list means valid.
inline std::vector<Finding> validate_template(const MaskTemplate& tmpl) {
    std::vector<Finding> findings;
    auto error = [&](std::string msg) {
        findings.push_back({Finding::Severity::error, std::move(msg)});
    };

    if (tmpl.raster.channels != 4) {
        error("raster has no alpha channel");
        return findings;
    }

    bool any_opaque = false, any_transparent = false;
    const std::size_t n = static_cast<std::size_t>(tmpl.raster.width) * tmpl.raster.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t a = tmpl.raster.data[i * 4 + 3];
        if (a == 255) any_opaque = true;
        if (a == 0) any_transparent = true;
        if (any_opaque && any_transparent) break;
    }
    if (!any_opaque) error("no opaque pixels in the alpha channel");
    if (!any_transparent) error("no transparent pixels in the alpha channel");

    for (int i = 0; i < CorrespondenceSet::kPointCount; ++i) {
        const Point p = tmpl.correspondence.mask_points[static_cast<std::size_t>(i)];
        if (p.x < 0.0 || p.y < 0.0 || p.x > tmpl.raster.width - 1 || p.y > tmpl.raster.height - 1)
            error("mask point " + std::to_string(i) + " lies outside the raster (" +
                  std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    }

    std::set<int> seen;
    for (int idx : tmpl.correspondence.face_indices) {
        if (idx < 0 || idx >= LandmarkSet::kPointCount)
            error("face index " + std::to_string(idx) + " out of range [0,67]");
        else if (!seen.insert(idx).second)
            error("duplicate face index " + std::to_string(idx));
    }
    if (!findings.empty())
        return findings;

    // Both-side strip triangulations must be non-degenerate.
    const LandmarkSet canon = canonical_frontal_landmarks();
    const auto face_pts = tmpl.correspondence.face_points(canon);
    const auto& mask_pts = tmpl.correspondence.mask_points;
    for (const Triangle& t : strip_triangulate(CorrespondenceSet::kPointCount)) {
        if (std::abs(signed_area2(mask_pts[t.a], mask_pts[t.b], mask_pts[t.c])) <= 2e-6)
            error("mask triangle (" + std::to_string(t.a) + "," + std::to_string(t.b) + "," +
                  std::to_string(t.c) + ") is degenerate");
        if (std::abs(signed_area2(face_pts[t.a], face_pts[t.b], face_pts[t.c])) <= 2e-6)
            error("face triangle (" + std::to_string(t.a) + "," + std::to_string(t.b) + "," +
                  std::to_string(t.c) + ") is degenerate on the frontal fixture");
    }
    if (!findings.empty())
        return findings;

    // Validation warp onto the frontal fixture must keep every patch.
    try {
        const LandmarkSet canon500 = scale_landmarks(canon, 250, 250, 500, 500);
        const WarpMaskResult warped =
            warp_mask(tmpl.raster, tmpl.correspondence, canon500, 500, 500);
        if (!warped.skipped.empty())
            error(std::to_string(warped.skipped.size()) +
                  " patches skipped on the frontal fixture");
        std::size_t covered = 0;
        for (std::size_t i = 3; i < warped.layer.data.size(); i += 4)
            if (warped.layer.data[i]) ++covered;
        if (covered * 50 < static_cast<std::size_t>(500) * 500)
            findings.push_back({Finding::Severity::warning,
                                "warped footprint covers less than 2% of the frontal fixture"});
    } catch (const GenerationFailedError& e) {
        error(std::string("validation warp failed: ") + e.what());
    }
    return findings;
}

// One JSON document per gallery directory; raster paths resolve relative
// to the manifest file.
struct GalleryManifest {
    struct Entry {
        std::string id;
        std::string raster_path;
        std::array<Point, CorrespondenceSet::kPointCount> mask_points;
        std::optional<std::array<int, CorrespondenceSet::kPointCount>> face_indices;
        std::vector<std::string> style_tags;
    };
    int version = 1;
    std::vector<Entry> entries;
};

inline GalleryManifest parse_gallery_manifest(const std::string& manifest_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw LoadError("gallery manifest " + manifest_path + ": " + e.what());
    }

    GalleryManifest manifest;
    try {
        manifest.version = doc.at("version").get<int>();
        for (const auto& t : doc.at("templates")) {
            GalleryManifest::Entry entry;
            entry.id = t.at("id").get<std::string>();
            entry.raster_path = t.at("raster_path").get<std::string>();
            const auto& pts = t.at("mask_points");
            if (pts.size() != CorrespondenceSet::kPointCount)
                throw LoadError("gallery manifest: template " + entry.id + " has " +
                                std::to_string(pts.size()) + " mask_points, expected 16");
            for (std::size_t i = 0; i < CorrespondenceSet::kPointCount; ++i)
                entry.mask_points[i] = {pts[i].at(0).get<double>(), pts[i].at(1).get<double>()};
            if (t.contains("face_indices")) {
                const auto& fi = t.at("face_indices");
                if (fi.size() != CorrespondenceSet::kPointCount)
                    throw LoadError("gallery manifest: template " + entry.id + " has " +
                                    std::to_string(fi.size()) + " face_indices, expected 16");
                std::array<int, CorrespondenceSet::kPointCount> idx{};
                for (std::size_t i = 0; i < CorrespondenceSet::kPointCount; ++i)
                    idx[i] = fi[i].get<int>();
                entry.face_indices = idx;
            }
            if (t.contains("style_tags"))
                for (const auto& tag : t.at("style_tags"))
                    entry.style_tags.push_back(tag.get<std::string>());
            manifest.entries.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("gallery manifest " + manifest_path + ": " + e.what());
    }
    return manifest;
}

// Loads and validates every template, in manifest order.
inline std::vector<MaskTemplate> load_gallery(const std::string& manifest_path) {
    const GalleryManifest manifest = parse_gallery_manifest(manifest_path);
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();

    std::vector<MaskTemplate> templates;
    std::set<std::string> ids;
    for (const auto& entry : manifest.entries) {
        if (!ids.insert(entry.id).second)
            throw LoadError("gallery manifest " + manifest_path + ": duplicate template id \"" +
                            entry.id + "\"");
        MaskTemplate tmpl;
        tmpl.id = entry.id;
        const std::filesystem::path raster = base / entry.raster_path;
        if (!std::filesystem::exists(raster))
            throw LoadError("template \"" + entry.id + "\": raster not found: " + raster.string());
        tmpl.raster = read_png(raster.string());
        tmpl.correspondence.mask_points = entry.mask_points;
        tmpl.correspondence.face_indices = entry.face_indices.value_or(default_face_indices());
        tmpl.style_tags = entry.style_tags;

        for (const Finding& f : validate_template(tmpl))
            if (f.severity == Finding::Severity::error)
                throw LoadError("template \"" + entry.id + "\": " + f.message);
        templates.push_back(std::move(tmpl));
    }
    return templates;
}

} // namespace maskbench
