#pragma once

// Shared fixture builders for the test suites: temp directories, synthetic
// face sets on disk, and pair lists at the scaled protocol sizes.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "maskbench/maskbench.hpp"

namespace testsup {

namespace fs = std::filesystem;

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("maskbench_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

// Writes images/<id>.png and landmarks/<id>.txt for n_identities * images_each
// synthetic faces; returns ids grouped by identity.
inline std::vector<std::vector<std::string>> write_face_set(const fs::path& root,
                                                            int n_identities, int images_each,
                                                            std::uint64_t seed = 7) {
    fs::create_directories(root / "images");
    fs::create_directories(root / "landmarks");
    std::vector<std::vector<std::string>> ids(static_cast<std::size_t>(n_identities));
    for (int i = 0; i < n_identities; ++i) {
        const std::uint64_t identity_seed = maskbench::derive_seed(seed, "identity_" + std::to_string(i));
        for (int k = 0; k < images_each; ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "person%04d_%02d", i, k);
            const std::uint64_t image_seed = maskbench::derive_seed(identity_seed, name);
            maskbench::write_png((root / "images" / (std::string(name) + ".png")).string(),
                                 maskbench::synthetic::synth_face(identity_seed, image_seed));
            maskbench::write_landmarks((root / "landmarks" / (std::string(name) + ".txt")).string(),
                                       maskbench::synthetic::identity_landmarks(identity_seed));
            ids[static_cast<std::size_t>(i)].push_back(name);
        }
    }
    return ids;
}

// n_pos positive pairs (the two images of each identity) followed by n_pos
// negative pairs (first images of neighboring identities). Needs
// n_identities == n_pos and images_each == 2 in write_face_set.
inline maskbench::PairList make_pairs(const std::vector<std::vector<std::string>>& ids, int n_pos) {
    maskbench::PairList pairs;
    for (int i = 0; i < n_pos; ++i)
        pairs.entries.push_back({ids[static_cast<std::size_t>(i)][0],
                                 ids[static_cast<std::size_t>(i)][1], true});
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n_pos; ++i)
        pairs.entries.push_back({ids[static_cast<std::size_t>(i)][0],
                                 ids[static_cast<std::size_t>((i + 1) % n)][0], false});
    return pairs;
}

inline void write_pairs(const fs::path& path, const maskbench::PairList& pairs) {
    std::ostringstream out;
    for (const auto& p : pairs.entries)
        out << p.name_a << ' ' << p.name_b << ' ' << (p.same_identity ? 1 : 0) << "\n";
    maskbench::write_text_file(path.string(), out.str());
}

// Writes the bundled synthetic gallery into a directory and returns the
// manifest path.
inline std::string write_gallery(const fs::path& dir) {
    fs::create_directories(dir);
    nlohmann::json templates = nlohmann::json::array();
    for (const maskbench::MaskTemplate& tmpl : maskbench::synthetic::fixture_gallery()) {
        const std::string file = tmpl.id + ".png";
        maskbench::write_png((dir / file).string(), tmpl.raster);
        nlohmann::json points = nlohmann::json::array();
        for (const maskbench::Point& p : tmpl.correspondence.mask_points)
            points.push_back({p.x, p.y});
        templates.push_back({{"id", tmpl.id},
                             {"raster_path", file},
                             {"mask_points", std::move(points)},
                             {"style_tags", tmpl.style_tags}});
    }
    const nlohmann::json manifest = {{"version", 1}, {"templates", std::move(templates)}};
    const std::string path = (dir / "manifest.json").string();
    maskbench::write_text_file(path, manifest.dump(2) + "\n");
    return path;
}

} // namespace testsup
