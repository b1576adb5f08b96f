#include <catch2/catch.hpp>

#include "maskbench/gallery.hpp"
#include "maskbench/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace maskbench;

TEST_CASE("bundled fixture gallery loads with zero findings") {
    testsup::TempDir dir("gallery");
    const std::string manifest = testsup::write_gallery(dir.path());

    const std::vector<MaskTemplate> gallery = load_gallery(manifest);
    REQUIRE(gallery.size() == 4u);
    CHECK(gallery[0].id == "surgical_blue");
    CHECK(gallery[1].id == "cloth_striped");
    CHECK(gallery[2].id == "gradient_gray");
    CHECK(gallery[3].id == "n95_white");
    for (const MaskTemplate& t : gallery) {
        CHECK(validate_template(t).empty());
        CHECK(t.raster.channels == 4);
    }

    // idempotent and order-stable
    const std::vector<MaskTemplate> again = load_gallery(manifest);
    REQUIRE(again.size() == gallery.size());
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        CHECK(again[i].id == gallery[i].id);
        CHECK(again[i].raster.data == gallery[i].raster.data);
    }
}

TEST_CASE("missing manifest and missing raster produce named errors") {
    testsup::TempDir dir("gallery_missing");
    CHECK_THROWS_AS(load_gallery((dir.path() / "nope.json").string()), LoadError);

    const std::string manifest = testsup::write_gallery(dir.path());
    std::filesystem::remove(dir.path() / "cloth_striped.png");
    try {
        load_gallery(manifest);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("cloth_striped") != std::string::npos);
    }
}

TEST_CASE("corrupt manifest JSON reports a parse error") {
    testsup::TempDir dir("gallery_corrupt");
    const std::string manifest = (dir.path() / "manifest.json").string();
    write_text_file(manifest, "{ \"version\": 1, \"templates\": [ oops ");
    CHECK_THROWS_AS(load_gallery(manifest), LoadError);
}

TEST_CASE("duplicate template ids are rejected") {
    testsup::TempDir dir("gallery_dup");
    testsup::write_gallery(dir.path());
    const MaskTemplate tmpl = synthetic::fixture_gallery()[0];

    nlohmann::json points = nlohmann::json::array();
    for (const Point& p : tmpl.correspondence.mask_points) points.push_back({p.x, p.y});
    nlohmann::json entry = {{"id", "twice"}, {"raster_path", "surgical_blue.png"},
                            {"mask_points", points}};
    const nlohmann::json manifest = {{"version", 1}, {"templates", {entry, entry}}};
    const std::string path = (dir.path() / "dup.json").string();
    write_text_file(path, manifest.dump());
    try {
        load_gallery(path);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
}

TEST_CASE("validate_template findings") {
    const MaskTemplate valid = synthetic::fixture_gallery()[0];

    SECTION("valid fixture yields no findings") {
        CHECK(validate_template(valid).empty());
    }
    SECTION("all-opaque raster") {
        MaskTemplate t = valid;
        for (std::size_t i = 3; i < t.raster.data.size(); i += 4) t.raster.data[i] = 255;
        const auto findings = validate_template(t);
        REQUIRE_FALSE(findings.empty());
        bool mentioned = false;
        for (const Finding& f : findings)
            if (f.message.find("no transparent pixels") != std::string::npos) mentioned = true;
        CHECK(mentioned);
    }
    SECTION("fully transparent raster") {
        MaskTemplate t = valid;
        for (std::size_t i = 3; i < t.raster.data.size(); i += 4) t.raster.data[i] = 0;
        const auto findings = validate_template(t);
        bool mentioned = false;
        for (const Finding& f : findings)
            if (f.message.find("no opaque pixels") != std::string::npos) mentioned = true;
        CHECK(mentioned);
    }
    SECTION("correspondence point outside the raster names its index") {
        MaskTemplate t = valid;
        t.correspondence.mask_points[5] = {1e6, 1e6};
        const auto findings = validate_template(t);
        REQUIRE_FALSE(findings.empty());
        bool named = false;
        for (const Finding& f : findings)
            if (f.message.find("mask point 5") != std::string::npos) named = true;
        CHECK(named);
    }
    SECTION("collinear mask points name the degenerate triangle") {
        MaskTemplate t = valid;
        // collapse points 2,3,4 onto one line: triangle (2,3,4) degenerates
        t.correspondence.mask_points[2] = {10.0, 10.0};
        t.correspondence.mask_points[3] = {20.0, 20.0};
        t.correspondence.mask_points[4] = {30.0, 30.0};
        const auto findings = validate_template(t);
        bool named = false;
        for (const Finding& f : findings)
            if (f.message.find("(2,3,4)") != std::string::npos &&
                f.message.find("degenerate") != std::string::npos)
                named = true;
        CHECK(named);
    }
    SECTION("face index out of range") {
        MaskTemplate t = valid;
        t.correspondence.face_indices[0] = 68;
        const auto findings = validate_template(t);
        REQUIRE_FALSE(findings.empty());
        CHECK(findings[0].message.find("out of range") != std::string::npos);
    }
    SECTION("duplicate face indices") {
        MaskTemplate t = valid;
        t.correspondence.face_indices[1] = t.correspondence.face_indices[0];
        const auto findings = validate_template(t);
        REQUIRE_FALSE(findings.empty());
    }
}

TEST_CASE("load_gallery surfaces validation failures with the template name") {
    testsup::TempDir dir("gallery_invalid");
    testsup::write_gallery(dir.path());

    // manifest whose only template has a correspondence point out of bounds
    const MaskTemplate tmpl = synthetic::fixture_gallery()[0];
    nlohmann::json points = nlohmann::json::array();
    for (const Point& p : tmpl.correspondence.mask_points) points.push_back({p.x, p.y});
    points[3] = {9999.0, 9999.0};
    const nlohmann::json manifest = {
        {"version", 1},
        {"templates",
         {{{"id", "broken"}, {"raster_path", "surgical_blue.png"}, {"mask_points", points}}}}};
    const std::string path = (dir.path() / "bad.json").string();
    write_text_file(path, manifest.dump());

    try {
        load_gallery(path);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("broken") != std::string::npos);
        CHECK(msg.find("mask point 3") != std::string::npos);
    }
}
