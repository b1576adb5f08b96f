// Regenerates the bundled synthetic mask gallery (PNG rasters plus
// manifest.json) and the canonical frontal landmark fixture. The output is
// deterministic, so the committed assets can always be rebuilt bit-exactly.

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "maskbench/maskbench.hpp"

namespace fs = std::filesystem;
using namespace maskbench;

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "gallery";
    fs::create_directories(out_dir);

    nlohmann::json templates = nlohmann::json::array();
    for (const MaskTemplate& tmpl : synthetic::fixture_gallery()) {
        const std::string file = tmpl.id + ".png";
        write_png((fs::path(out_dir) / file).string(), tmpl.raster);

        nlohmann::json points = nlohmann::json::array();
        for (const Point& p : tmpl.correspondence.mask_points)
            points.push_back({p.x, p.y});
        templates.push_back({{"id", tmpl.id},
                             {"raster_path", file},
                             {"mask_points", std::move(points)},
                             {"style_tags", tmpl.style_tags}});
        std::printf("wrote %s\n", file.c_str());
    }

    const nlohmann::json manifest = {{"version", 1}, {"templates", std::move(templates)}};
    write_text_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    write_landmarks((fs::path(out_dir) / "canonical_landmarks.txt").string(),
                    canonical_frontal_landmarks());
    std::printf("wrote manifest.json and canonical_landmarks.txt\n");
    return 0;
}
