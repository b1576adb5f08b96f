#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "maskbench/compose.hpp"
#include "maskbench/error.hpp"
#include "maskbench/gallery.hpp"
#include "maskbench/io.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {

// Verification pair: two image ids and whether they share an identity.
struct PairEntry {
    std::string name_a;
    std::string name_b;
    bool same_identity = false;
};

struct PairList {
    std::vector<PairEntry> entries;

    int positives() const {
        return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                              [](const PairEntry& p) { return p.same_identity; }));
    }
    int negatives() const { return static_cast<int>(entries.size()) - positives(); }
};

// Input pair list: one pair per line, "name_a name_b label" with label 1 for
// same identity and 0 otherwise.
inline PairList read_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open pair list: " + path);
    PairList pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        PairEntry entry;
        int label;
        if (!(ss >> entry.name_a >> entry.name_b >> label) || (label != 0 && label != 1))
            throw LoadError("pair list " + path + ": malformed line " + std::to_string(line_no));
        entry.same_identity = (label == 1);
        pairs.entries.push_back(std::move(entry));
    }
    return pairs;
}

// The three verification scenarios.
enum class Scenario : int {
    one_masked = 1,               // one side wears a mask
    same_id_different_masks = 2,  // positives, both masked, distinct templates
    different_id_same_mask = 3,   // negatives, both masked, shared template
};

struct PlanRecord {
    int pair_index = 0;
    std::string name_a;
    std::string name_b;
    bool same_identity = false;
    Scenario scenario = Scenario::one_masked;
    bool mask_a = false;
    bool mask_b = false;
    std::string template_a; // empty when side a is unmasked
    std::string template_b;
    std::string output_a;   // suffixed output stem, empty when unmasked
    std::string output_b;
    std::uint64_t seed_a = 0;
    std::uint64_t seed_b = 0;
};

struct GenerationPlan {
    std::uint64_t global_seed = 0;
    std::string gallery_id;
    std::vector<PlanRecord> records;

    int count(Scenario s) const {
        return static_cast<int>(std::count_if(records.begin(), records.end(),
                                              [&](const PlanRecord& r) { return r.scenario == s; }));
    }
};

// Per-pair fold index in [0, fold_count).
struct FoldAssignment {
    int fold_count = 10;
    std::vector<int> fold_of_pair;
};

namespace detail {

template <typename T>
inline void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next_below(i)]);
}

} // namespace detail

// Seeded scenario split. Half the positives go to scenario 2, half the
// negatives to scenario 3, the remainder forms scenario 1 with the masked
// side drawn uniformly per pair. Proportions scale 2:1:1 with the input.
inline GenerationPlan split_pairs(const PairList& pairs, std::uint64_t seed) {
    const int pos = pairs.positives();
    const int neg = pairs.negatives();
    if (pos != neg || pos % 2 != 0 || pos == 0)
        throw std::invalid_argument(
            "split_pairs: need an equal, even, nonzero number of positive and negative pairs, got " +
            std::to_string(pos) + " positive / " + std::to_string(neg) + " negative");

    std::vector<int> pos_idx, neg_idx;
    for (std::size_t i = 0; i < pairs.entries.size(); ++i)
        (pairs.entries[i].same_identity ? pos_idx : neg_idx).push_back(static_cast<int>(i));

    Rng rng(derive_seed(seed, "split"));
    detail::shuffle(pos_idx, rng);
    detail::shuffle(neg_idx, rng);

    GenerationPlan plan;
    plan.global_seed = seed;
    plan.records.resize(pairs.entries.size());
    for (std::size_t i = 0; i < pairs.entries.size(); ++i) {
        PlanRecord& r = plan.records[i];
        r.pair_index = static_cast<int>(i);
        r.name_a = pairs.entries[i].name_a;
        r.name_b = pairs.entries[i].name_b;
        r.same_identity = pairs.entries[i].same_identity;
    }
    for (int k = 0; k < pos / 2; ++k) {
        PlanRecord& r = plan.records[static_cast<std::size_t>(pos_idx[static_cast<std::size_t>(k)])];
        r.scenario = Scenario::same_id_different_masks;
        r.mask_a = r.mask_b = true;
    }
    for (int k = 0; k < neg / 2; ++k) {
        PlanRecord& r = plan.records[static_cast<std::size_t>(neg_idx[static_cast<std::size_t>(k)])];
        r.scenario = Scenario::different_id_same_mask;
        r.mask_a = r.mask_b = true;
    }
    for (std::size_t k = static_cast<std::size_t>(pos / 2); k < pos_idx.size(); ++k) {
        PlanRecord& r = plan.records[static_cast<std::size_t>(pos_idx[k])];
        r.scenario = Scenario::one_masked;
    }
    for (std::size_t k = static_cast<std::size_t>(neg / 2); k < neg_idx.size(); ++k) {
        PlanRecord& r = plan.records[static_cast<std::size_t>(neg_idx[k])];
        r.scenario = Scenario::one_masked;
    }
    // Masked side of scenario 1, drawn in pair order.
    for (PlanRecord& r : plan.records) {
        if (r.scenario != Scenario::one_masked) continue;
        if (rng.next_below(2) == 0)
            r.mask_a = true;
        else
            r.mask_b = true;
    }
    return plan;
}

// Seeded template draws honoring the scenario constraints, then output
// names (per-source "_0001" suffixes) and per-image derived seeds.
inline void assign_templates(GenerationPlan& plan, const std::vector<MaskTemplate>& gallery,
                             std::uint64_t seed) {
    if (gallery.empty())
        throw std::invalid_argument("assign_templates: gallery is empty");
    const bool any_scenario2 = plan.count(Scenario::same_id_different_masks) > 0;
    if (gallery.size() < 2 && any_scenario2)
        throw std::invalid_argument(
            "assign_templates: scenario 2 needs at least 2 templates, gallery has " +
            std::to_string(gallery.size()));

    Rng rng(derive_seed(seed, "templates"));
    const auto draw = [&]() { return gallery[rng.next_below(gallery.size())].id; };

    for (PlanRecord& r : plan.records) {
        switch (r.scenario) {
        case Scenario::one_masked:
            (r.mask_a ? r.template_a : r.template_b) = draw();
            break;
        case Scenario::same_id_different_masks: {
            const std::uint64_t a = rng.next_below(gallery.size());
            std::uint64_t b = rng.next_below(gallery.size() - 1);
            if (b >= a) ++b;
            r.template_a = gallery[a].id;
            r.template_b = gallery[b].id;
            break;
        }
        case Scenario::different_id_same_mask:
            r.template_a = r.template_b = draw();
            break;
        }
    }

    std::map<std::string, int> occurrences;
    const auto next_output = [&](const std::string& source) {
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_%04d", ++occurrences[source]);
        return source + suffix;
    };
    for (PlanRecord& r : plan.records) {
        if (r.mask_a) {
            r.output_a = next_output(r.name_a);
            r.seed_a = derive_seed(plan.global_seed, r.output_a);
        }
        if (r.mask_b) {
            r.output_b = next_output(r.name_b);
            r.seed_b = derive_seed(plan.global_seed, r.output_b);
        }
    }
}

// Seeded balanced fold split: every fold receives the same number of
// positive and negative pairs.
inline FoldAssignment make_folds(const GenerationPlan& plan, std::uint64_t seed, int fold_count = 10) {
    std::vector<int> pos_idx, neg_idx;
    for (const PlanRecord& r : plan.records)
        (r.same_identity ? pos_idx : neg_idx).push_back(r.pair_index);
    const int pos = static_cast<int>(pos_idx.size());
    const int neg = static_cast<int>(neg_idx.size());
    if (fold_count < 1 || pos % fold_count != 0 || neg % fold_count != 0)
        throw std::invalid_argument("make_folds: " + std::to_string(pos) + " positive and " +
                                    std::to_string(neg) + " negative pairs are not divisible into " +
                                    std::to_string(fold_count) + " balanced folds");

    Rng rng(derive_seed(seed, "folds"));
    detail::shuffle(pos_idx, rng);
    detail::shuffle(neg_idx, rng);

    FoldAssignment folds;
    folds.fold_count = fold_count;
    folds.fold_of_pair.assign(plan.records.size(), 0);
    for (int k = 0; k < pos; ++k)
        folds.fold_of_pair[static_cast<std::size_t>(pos_idx[static_cast<std::size_t>(k)])] =
            k / (pos / fold_count);
    for (int k = 0; k < neg; ++k)
        folds.fold_of_pair[static_cast<std::size_t>(neg_idx[static_cast<std::size_t>(k)])] =
            k / (neg / fold_count);
    return folds;
}

inline void write_folds(const std::string& path, const FoldAssignment& folds) {
    std::ostringstream out;
    for (int f : folds.fold_of_pair) out << f << "\n";
    write_text_file(path, out.str());
}

inline FoldAssignment read_folds(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open fold file: " + path);
    FoldAssignment folds;
    folds.fold_count = 0;
    int f;
    while (in >> f) {
        if (f < 0)
            throw LoadError("fold file " + path + ": negative fold index");
        folds.fold_of_pair.push_back(f);
        folds.fold_count = std::max(folds.fold_count, f + 1);
    }
    return folds;
}

// Table-style masked-pair statistics of a plan.
struct MaskCountStats {
    int one_mask_positive = 0;
    int one_mask_negative = 0;
    int two_mask_positive = 0;
    int two_mask_negative = 0;
};

inline MaskCountStats plan_statistics(const GenerationPlan& plan) {
    MaskCountStats s;
    for (const PlanRecord& r : plan.records) {
        const int masks = (r.mask_a ? 1 : 0) + (r.mask_b ? 1 : 0);
        if (masks == 1)
            (r.same_identity ? s.one_mask_positive : s.one_mask_negative)++;
        else if (masks == 2)
            (r.same_identity ? s.two_mask_positive : s.two_mask_negative)++;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Plan serialization

inline nlohmann::json plan_to_json(const GenerationPlan& plan) {
    nlohmann::json records = nlohmann::json::array();
    for (const PlanRecord& r : plan.records) {
        records.push_back({{"pair_index", r.pair_index},
                           {"name_a", r.name_a},
                           {"name_b", r.name_b},
                           {"same_identity", r.same_identity},
                           {"scenario", static_cast<int>(r.scenario)},
                           {"mask_a", r.mask_a},
                           {"mask_b", r.mask_b},
                           {"template_a", r.template_a},
                           {"template_b", r.template_b},
                           {"output_a", r.output_a},
                           {"output_b", r.output_b},
                           {"seed_a", r.seed_a},
                           {"seed_b", r.seed_b}});
    }
    return {{"global_seed", plan.global_seed},
            {"gallery_id", plan.gallery_id},
            {"records", std::move(records)}};
}

// ---------------------------------------------------------------------------
// Generation

struct GeneratedArtifact {
    std::string output_name;
    std::string source_name;
    int pair_index = 0;
    char side = 'a';
    std::string template_id;
    std::uint64_t seed = 0;
    Point face_offset{0, 0};
    Point mask_offset{0, 0};
    std::vector<std::string> warnings;
};

struct GenerationFailure {
    int pair_index = 0;
    std::string output_name;
    std::string message;
};

struct GenerationOutcome {
    std::vector<GeneratedArtifact> artifacts;
    std::vector<GenerationFailure> failures;
};

namespace detail {

inline std::string resolve_image_path(const std::filesystem::path& dir, const std::string& name) {
    for (const char* ext : {".png", ".jpg", ".jpeg"}) {
        const std::filesystem::path candidate = dir / (name + ext);
        if (std::filesystem::exists(candidate))
            return candidate.string();
    }
    throw LoadError("no image found for \"" + name + "\" under " + dir.string());
}

} // namespace detail

// Runs the plan: one PNG plus one landmark sidecar per masked face under
// out_dir/images and out_dir/landmarks, then pairing.txt and manifest.json.
// Unmasked sides are referenced by their original name, never copied.
// Per-item failures are recorded and the build continues.
inline GenerationOutcome generate(const GenerationPlan& plan, const std::string& image_dir,
                                  const std::string& landmark_dir,
                                  const std::vector<MaskTemplate>& gallery,
                                  const ComposeParams& params, const std::string& out_dir,
                                  int jobs = 0) {
    namespace fs = std::filesystem;
    params.validate();
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "landmarks");

    std::map<std::string, const MaskTemplate*> by_id;
    for (const MaskTemplate& t : gallery) by_id[t.id] = &t;

    struct WorkItem {
        const PlanRecord* record;
        char side;
    };
    std::vector<WorkItem> work;
    for (const PlanRecord& r : plan.records) {
        if (r.mask_a) work.push_back({&r, 'a'});
        if (r.mask_b) work.push_back({&r, 'b'});
    }

    struct Slot {
        bool ok = false;
        GeneratedArtifact artifact;
        GenerationFailure failure;
    };
    std::vector<Slot> slots(work.size());

    const auto run_item = [&](std::size_t i) {
        const WorkItem& item = work[i];
        const PlanRecord& r = *item.record;
        const std::string source = (item.side == 'a') ? r.name_a : r.name_b;
        const std::string output = (item.side == 'a') ? r.output_a : r.output_b;
        const std::string template_id = (item.side == 'a') ? r.template_a : r.template_b;
        const std::uint64_t seed = (item.side == 'a') ? r.seed_a : r.seed_b;
        Slot& slot = slots[i];
        try {
            const auto tmpl_it = by_id.find(template_id);
            if (tmpl_it == by_id.end())
                throw LoadError("template \"" + template_id + "\" not in gallery");
            const ImageBuffer face = read_image(detail::resolve_image_path(image_dir, source));
            const LandmarkSet landmarks =
                read_landmarks((fs::path(landmark_dir) / (source + ".txt")).string());

            ComposeParams p = params;
            p.seed = seed;
            const MaskedFaceResult result = apply_mask(face, landmarks, *tmpl_it->second, p);

            write_png((fs::path(out_dir) / "images" / (output + ".png")).string(), result.image);
            const LandmarkSet out_lm = scale_landmarks(landmarks, face.width, face.height,
                                                       p.output_side, p.output_side);
            write_landmarks((fs::path(out_dir) / "landmarks" / (output + ".txt")).string(), out_lm);

            slot.ok = true;
            slot.artifact = {output,
                             source,
                             r.pair_index,
                             item.side,
                             template_id,
                             seed,
                             result.face_offset,
                             result.mask_offset,
                             result.warnings};
        } catch (const std::exception& e) {
            slot.ok = false;
            slot.failure = {r.pair_index, output, e.what()};
        }
    };

    int thread_count = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    thread_count = std::max(1, std::min<int>(thread_count, static_cast<int>(work.size())));
    if (thread_count <= 1) {
        for (std::size_t i = 0; i < work.size(); ++i) run_item(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int t = 0; t < thread_count; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < work.size(); i = next.fetch_add(1))
                    run_item(i);
            });
        for (std::thread& t : pool) t.join();
    }

    GenerationOutcome outcome;
    for (const Slot& slot : slots) {
        if (slot.ok)
            outcome.artifacts.push_back(slot.artifact);
        else
            outcome.failures.push_back(slot.failure);
    }

    // pairing.txt: masked sides by output name, unmasked sides by source name.
    std::ostringstream pairing;
    for (const PlanRecord& r : plan.records) {
        pairing << (r.mask_a ? r.output_a : r.name_a) << ' ' << (r.mask_b ? r.output_b : r.name_b)
                << ' ' << (r.same_identity ? 1 : 0) << "\n";
    }
    write_text_file((fs::path(out_dir) / "pairing.txt").string(), pairing.str());

    nlohmann::json artifacts = nlohmann::json::array();
    for (const GeneratedArtifact& a : outcome.artifacts) {
        artifacts.push_back({{"output", a.output_name},
                             {"source", a.source_name},
                             {"pair_index", a.pair_index},
                             {"side", std::string(1, a.side)},
                             {"template_id", a.template_id},
                             {"seed", a.seed},
                             {"face_offset", {a.face_offset.x, a.face_offset.y}},
                             {"mask_offset", {a.mask_offset.x, a.mask_offset.y}},
                             {"warnings", a.warnings}});
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const GenerationFailure& f : outcome.failures)
        failures.push_back(
            {{"pair_index", f.pair_index}, {"output", f.output_name}, {"message", f.message}});
    const nlohmann::json manifest = {{"global_seed", plan.global_seed},
                                     {"gallery_id", plan.gallery_id},
                                     {"artifacts", std::move(artifacts)},
                                     {"failures", std::move(failures)}};
    write_text_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    return outcome;
}

} // namespace maskbench
