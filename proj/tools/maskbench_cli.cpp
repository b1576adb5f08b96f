// maskbench command-line front end: single-image masking, dataset builds,
// verification scoring and gallery validation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maskbench/maskbench.hpp"

namespace fs = std::filesystem;
using namespace maskbench;

namespace {

struct ComposeOptions {
    int target_side = 500;
    double alpha = 0.6;
    int beta = 5;
    double perturb_face = 0.1;
    double perturb_mask = 0.1;
    int output_side = 250;

    ComposeParams params(std::uint64_t seed) const {
        ComposeParams p;
        p.target_side = target_side;
        p.alpha = alpha;
        p.beta = beta;
        p.perturb_face_top = perturb_face;
        p.perturb_mask_top = perturb_mask;
        p.output_side = output_side;
        p.seed = seed;
        return p;
    }
};

void add_compose_flags(CLI::App* cmd, ComposeOptions& opt) {
    cmd->add_option("--target-side", opt.target_side, "Working resolution for warping and blending")
        ->capture_default_str();
    cmd->add_option("--alpha", opt.alpha, "Mask lightness weight in [0,1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--beta", opt.beta, "Odd boundary-blur kernel size")->capture_default_str();
    cmd->add_option("--perturb-face", opt.perturb_face,
                    "Top-of-face jitter as a fraction of interocular distance")
        ->capture_default_str();
    cmd->add_option("--perturb-mask", opt.perturb_mask,
                    "Top-of-mask jitter as a fraction of mask bounding-box height")
        ->capture_default_str();
    cmd->add_option("--output-side", opt.output_side, "Output image side length")
        ->capture_default_str();
}

int cmd_mask_one(const std::string& face_path, const std::string& landmarks_path,
                 const std::string& gallery_path, const std::string& template_id,
                 const std::string& out_path, const ComposeOptions& opt, std::uint64_t seed) {
    const std::vector<MaskTemplate> gallery = load_gallery(gallery_path);
    const MaskTemplate* tmpl = nullptr;
    for (const MaskTemplate& t : gallery)
        if (t.id == template_id) tmpl = &t;
    if (!tmpl)
        throw LoadError("template \"" + template_id + "\" not found in " + gallery_path);

    const ImageBuffer face = read_image(face_path);
    const LandmarkSet landmarks = read_landmarks(landmarks_path);
    const MaskedFaceResult result = apply_mask(face, landmarks, *tmpl, opt.params(seed));

    write_png(out_path, result.image);
    const fs::path base(out_path);
    const fs::path lm_path = fs::path(base).replace_extension(".txt");
    write_landmarks(lm_path.string(), scale_landmarks(landmarks, face.width, face.height,
                                                      opt.output_side, opt.output_side));

    const nlohmann::json provenance = {
        {"template_id", result.template_id},
        {"seed", seed},
        {"face_offset", {result.face_offset.x, result.face_offset.y}},
        {"mask_offset", {result.mask_offset.x, result.mask_offset.y}},
        {"warnings", result.warnings}};
    const fs::path prov_path = fs::path(base).replace_extension(".json");
    write_text_file(prov_path.string(), provenance.dump(2) + "\n");

    std::cout << "image:      " << out_path << "\n"
              << "landmarks:  " << lm_path.string() << "\n"
              << "provenance: " << prov_path.string() << "\n";
    for (const std::string& w : result.warnings)
        std::cerr << "warning: " << w << "\n";
    return 0;
}

void print_statistics(const GenerationPlan& plan) {
    const MaskCountStats s = plan_statistics(plan);
    std::printf("mask count | positive pairs | negative pairs\n");
    std::printf("         1 | %14d | %14d\n", s.one_mask_positive, s.one_mask_negative);
    std::printf("         2 | %14d | %14d\n", s.two_mask_positive, s.two_mask_negative);
    std::printf("scenarios: %d one-masked, %d same-id-different-masks, %d different-id-same-mask\n",
                plan.count(Scenario::one_masked), plan.count(Scenario::same_id_different_masks),
                plan.count(Scenario::different_id_same_mask));
}

int cmd_build_dataset(const std::string& pairs_path, const std::string& image_dir,
                      const std::string& landmark_dir, const std::string& gallery_path,
                      const std::string& out_dir, const ComposeOptions& opt, std::uint64_t seed,
                      int jobs, const std::string& folds_file) {
    const PairList pairs = read_pairs(pairs_path);
    const std::vector<MaskTemplate> gallery = load_gallery(gallery_path);

    GenerationPlan plan = split_pairs(pairs, seed);
    plan.gallery_id = gallery_path;
    assign_templates(plan, gallery, seed);

    const FoldAssignment folds = folds_file.empty()
                                     ? make_folds(plan, seed)
                                     : read_folds(folds_file);
    if (folds.fold_of_pair.size() != pairs.entries.size())
        throw std::invalid_argument("fold file covers " + std::to_string(folds.fold_of_pair.size()) +
                                    " pairs, expected " + std::to_string(pairs.entries.size()));

    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "plan.json").string(), plan_to_json(plan).dump(2) + "\n");

    const GenerationOutcome outcome =
        generate(plan, image_dir, landmark_dir, gallery, opt.params(seed), out_dir, jobs);
    write_folds((fs::path(out_dir) / "folds.txt").string(), folds);

    print_statistics(plan);
    std::printf("generated %zu masked faces into %s\n", outcome.artifacts.size(), out_dir.c_str());

    if (!outcome.failures.empty()) {
        std::fprintf(stderr, "%zu generation failures:\n", outcome.failures.size());
        for (const GenerationFailure& f : outcome.failures)
            std::fprintf(stderr, "  pair %d (%s): %s\n", f.pair_index, f.output_name.c_str(),
                         f.message.c_str());
        return 1;
    }
    return 0;
}

int cmd_eval(const std::string& pairing_path, const std::string& folds_path,
             const std::string& embeddings_path, const std::string& report_path) {
    const PairList pairs = read_pairs(pairing_path);
    const FoldAssignment folds = read_folds(folds_path);
    const EmbeddingTable table = read_embeddings(embeddings_path);

    const VerificationReport report =
        kfold_accuracy(pairs, folds, table, std::max(folds.fold_count, 1));

    std::printf("fold | threshold | accuracy\n");
    for (const FoldOutcome& f : report.folds)
        std::printf("%4d | %9.6f | %7.4f%%\n", f.fold, f.threshold, 100.0 * f.accuracy);
    std::printf("mean accuracy: %.4f%% +- %.4f%% over %zu pairs\n", 100.0 * report.mean_accuracy,
                100.0 * report.std_accuracy, report.pair_count);

    if (!report_path.empty())
        write_text_file(report_path, report_to_json(report).dump(2) + "\n");
    return 0;
}

int cmd_validate_gallery(const std::string& gallery_path) {
    const GalleryManifest manifest = parse_gallery_manifest(gallery_path);
    const fs::path base = fs::path(gallery_path).parent_path();

    int errors = 0;
    for (const auto& entry : manifest.entries) {
        MaskTemplate tmpl;
        tmpl.id = entry.id;
        try {
            tmpl.raster = read_png((base / entry.raster_path).string());
        } catch (const std::exception& e) {
            std::printf("%s: error: %s\n", entry.id.c_str(), e.what());
            ++errors;
            continue;
        }
        tmpl.correspondence.mask_points = entry.mask_points;
        tmpl.correspondence.face_indices = entry.face_indices.value_or(default_face_indices());
        tmpl.style_tags = entry.style_tags;

        const std::vector<Finding> findings = validate_template(tmpl);
        if (findings.empty()) {
            std::printf("%s: ok\n", entry.id.c_str());
            continue;
        }
        for (const Finding& f : findings) {
            const bool is_error = f.severity == Finding::Severity::error;
            std::printf("%s: %s: %s\n", entry.id.c_str(), is_error ? "error" : "warning",
                        f.message.c_str());
            if (is_error) ++errors;
        }
    }
    return errors == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"masked-face synthesis and verification benchmarking toolkit"};
    app.require_subcommand(1);

    // mask-one
    auto* mask_one = app.add_subcommand("mask-one", "Composite one mask template onto one face");
    std::string face_path, landmarks_path, gallery_path, template_id, out_path;
    ComposeOptions mask_opt;
    std::uint64_t mask_seed = 0;
    mask_one->add_option("--face", face_path, "Face image (PNG or JPEG)")->required();
    mask_one->add_option("--landmarks", landmarks_path, "68-point landmark sidecar")->required();
    mask_one->add_option("--gallery", gallery_path, "Gallery manifest JSON")->required();
    mask_one->add_option("--template", template_id, "Template id from the gallery")->required();
    mask_one->add_option("--out", out_path, "Output PNG path")->required();
    add_compose_flags(mask_one, mask_opt);
    mask_one->add_option("--seed", mask_seed, "Perturbation seed")->capture_default_str();

    // build-dataset
    auto* build = app.add_subcommand("build-dataset",
                                     "Generate a three-scenario masked verification dataset");
    std::string pairs_path, image_dir, landmark_dir, build_gallery, out_dir, folds_file;
    ComposeOptions build_opt;
    std::uint64_t build_seed = 0;
    int jobs = 0;
    build->add_option("--pairs", pairs_path, "Input pair list (name_a name_b label)")->required();
    build->add_option("--images", image_dir, "Directory of source images")->required();
    build->add_option("--landmarks", landmark_dir, "Directory of landmark sidecars")->required();
    build->add_option("--gallery", build_gallery, "Gallery manifest JSON")->required();
    build->add_option("--out", out_dir, "Output directory")->required();
    add_compose_flags(build, build_opt);
    build->add_option("--seed", build_seed, "Global build seed")->capture_default_str();
    build->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
    build->add_option("--folds-file", folds_file,
                      "Pass an existing fold assignment through unchanged");

    // eval
    auto* eval = app.add_subcommand("eval", "Score embeddings with 10-fold verification accuracy");
    std::string pairing_path, folds_path, embeddings_path, report_path;
    eval->add_option("--pairing", pairing_path, "pairing.txt from build-dataset")->required();
    eval->add_option("--folds", folds_path, "folds.txt from build-dataset")->required();
    eval->add_option("--embeddings", embeddings_path, "Embedding table (.txt or .bin)")->required();
    eval->add_option("--report", report_path, "Write a JSON report here");

    // validate-gallery
    auto* validate = app.add_subcommand("validate-gallery", "Check every template in a gallery");
    std::string validate_path;
    validate->add_option("--gallery", validate_path, "Gallery manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(mask_one))
            return cmd_mask_one(face_path, landmarks_path, gallery_path, template_id, out_path,
                                mask_opt, mask_seed);
        if (app.got_subcommand(build))
            return cmd_build_dataset(pairs_path, image_dir, landmark_dir, build_gallery, out_dir,
                                     build_opt, build_seed, jobs, folds_file);
        if (app.got_subcommand(eval))
            return cmd_eval(pairing_path, folds_path, embeddings_path, report_path);
        if (app.got_subcommand(validate))
            return cmd_validate_gallery(validate_path);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
