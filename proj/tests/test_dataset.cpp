#include <catch2/catch.hpp>

#include <set>

#include "maskbench/dataset.hpp"
#include "maskbench/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace maskbench;

namespace {

// A pair list of the requested polarity counts with synthetic names; no
// files behind it, which is all planning needs.
PairList synthetic_pairs(int n_pos, int n_neg) {
    PairList pairs;
    for (int i = 0; i < n_pos; ++i)
        pairs.entries.push_back({"id" + std::to_string(i) + "_a", "id" + std::to_string(i) + "_b", true});
    for (int i = 0; i < n_neg; ++i)
        pairs.entries.push_back(
            {"id" + std::to_string(i) + "_a", "id" + std::to_string(i + 1) + "_a", false});
    return pairs;
}

} // namespace

TEST_CASE("split_pairs at full scale matches the protocol statistics") {
    const PairList pairs = synthetic_pairs(3000, 3000);
    const GenerationPlan plan = split_pairs(pairs, 42);

    CHECK(plan.count(Scenario::one_masked) == 3000);
    CHECK(plan.count(Scenario::same_id_different_masks) == 1500);
    CHECK(plan.count(Scenario::different_id_same_mask) == 1500);

    int s1_pos = 0, s1_neg = 0;
    for (const PlanRecord& r : plan.records) {
        if (r.scenario != Scenario::one_masked) continue;
        (r.same_identity ? s1_pos : s1_neg)++;
        CHECK((r.mask_a != r.mask_b)); // exactly one side masked
    }
    CHECK(s1_pos == 1500);
    CHECK(s1_neg == 1500);

    const MaskCountStats stats = plan_statistics(plan);
    CHECK(stats.one_mask_positive == 1500);
    CHECK(stats.one_mask_negative == 1500);
    CHECK(stats.two_mask_positive == 1500);
    CHECK(stats.two_mask_negative == 1500);
}

TEST_CASE("split_pairs is deterministic per seed and exhaustive") {
    const PairList pairs = synthetic_pairs(30, 30);
    const GenerationPlan a = split_pairs(pairs, 7);
    const GenerationPlan b = split_pairs(pairs, 7);
    const GenerationPlan c = split_pairs(pairs, 8);

    REQUIRE(a.records.size() == b.records.size());
    bool all_equal = true, any_diff_c = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        if (a.records[i].scenario != b.records[i].scenario ||
            a.records[i].mask_a != b.records[i].mask_a)
            all_equal = false;
        if (a.records[i].scenario != c.records[i].scenario ||
            a.records[i].mask_a != c.records[i].mask_a)
            any_diff_c = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_c);

    // scenario polarity constraints hold and the union covers the input
    CHECK(a.count(Scenario::one_masked) == 30);
    CHECK(a.count(Scenario::same_id_different_masks) == 15);
    CHECK(a.count(Scenario::different_id_same_mask) == 15);
    for (const PlanRecord& r : a.records) {
        if (r.scenario == Scenario::same_id_different_masks) CHECK(r.same_identity);
        if (r.scenario == Scenario::different_id_same_mask) CHECK_FALSE(r.same_identity);
    }
}

TEST_CASE("split_pairs rejects unbalanced inputs with counts") {
    try {
        split_pairs(synthetic_pairs(10, 8), 1);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("10") != std::string::npos);
        CHECK(msg.find("8") != std::string::npos);
    }
    CHECK_THROWS_AS(split_pairs(synthetic_pairs(3, 3), 1), std::invalid_argument);
    CHECK_THROWS_AS(split_pairs(PairList{}, 1), std::invalid_argument);
}

TEST_CASE("assign_templates honors the scenario constraints") {
    const std::vector<MaskTemplate> gallery = synthetic::fixture_gallery();
    GenerationPlan plan = split_pairs(synthetic_pairs(200, 200), 5);
    assign_templates(plan, gallery, 5);

    for (const PlanRecord& r : plan.records) {
        switch (r.scenario) {
        case Scenario::one_masked:
            CHECK(((r.mask_a && !r.template_a.empty() && r.template_b.empty()) ||
                   (r.mask_b && !r.template_b.empty() && r.template_a.empty())));
            break;
        case Scenario::same_id_different_masks:
            CHECK(r.template_a != r.template_b);
            CHECK(!r.template_a.empty());
            CHECK(!r.template_b.empty());
            break;
        case Scenario::different_id_same_mask:
            CHECK(r.template_a == r.template_b);
            CHECK(!r.template_a.empty());
            break;
        }
    }
}

TEST_CASE("assign_templates draws templates uniformly in scenario 3") {
    std::vector<MaskTemplate> two;
    two.push_back(synthetic::fixture_gallery()[0]);
    two.push_back(synthetic::fixture_gallery()[1]);

    // 20,000 negative pairs -> 10,000 scenario-3 records
    GenerationPlan plan = split_pairs(synthetic_pairs(20000, 20000), 11);
    assign_templates(plan, two, 11);

    int first = 0, total = 0;
    for (const PlanRecord& r : plan.records) {
        if (r.scenario != Scenario::different_id_same_mask) continue;
        ++total;
        if (r.template_a == two[0].id) ++first;
    }
    REQUIRE(total == 10000);
    const double freq = static_cast<double>(first) / total;
    CHECK(freq >= 0.45);
    CHECK(freq <= 0.55);
}

TEST_CASE("assign_templates needs two templates for scenario 2") {
    std::vector<MaskTemplate> one;
    one.push_back(synthetic::fixture_gallery()[0]);
    GenerationPlan plan = split_pairs(synthetic_pairs(4, 4), 3);
    CHECK_THROWS_AS(assign_templates(plan, one, 3), std::invalid_argument);
    CHECK_THROWS_AS(assign_templates(plan, {}, 3), std::invalid_argument);
}

TEST_CASE("output names get per-source suffixes in order") {
    // the same source appears in several pairs and accumulates _0001, _0002...
    PairList pairs;
    pairs.entries.push_back({"alice", "bob", true});
    pairs.entries.push_back({"alice", "carol", true});
    pairs.entries.push_back({"alice", "dave", false});
    pairs.entries.push_back({"erin", "frank", false});
    GenerationPlan plan;
    plan.global_seed = 9;
    plan.records.resize(4);
    for (int i = 0; i < 4; ++i) {
        plan.records[static_cast<std::size_t>(i)].pair_index = i;
        plan.records[static_cast<std::size_t>(i)].name_a = pairs.entries[static_cast<std::size_t>(i)].name_a;
        plan.records[static_cast<std::size_t>(i)].name_b = pairs.entries[static_cast<std::size_t>(i)].name_b;
        plan.records[static_cast<std::size_t>(i)].same_identity =
            pairs.entries[static_cast<std::size_t>(i)].same_identity;
        plan.records[static_cast<std::size_t>(i)].scenario = Scenario::different_id_same_mask;
        plan.records[static_cast<std::size_t>(i)].mask_a = true;
        plan.records[static_cast<std::size_t>(i)].mask_b = true;
    }
    assign_templates(plan, synthetic::fixture_gallery(), 9);

    CHECK(plan.records[0].output_a == "alice_0001");
    CHECK(plan.records[1].output_a == "alice_0002");
    CHECK(plan.records[2].output_a == "alice_0003");
    CHECK(plan.records[0].output_b == "bob_0001");
    CHECK(plan.records[3].output_a == "erin_0001");

    // per-image seeds are distinct and reproducible
    CHECK(plan.records[0].seed_a != plan.records[1].seed_a);
    CHECK(plan.records[0].seed_a == derive_seed(9, "alice_0001"));
}

TEST_CASE("make_folds balances positives and negatives") {
    SECTION("full scale") {
        const GenerationPlan plan = split_pairs(synthetic_pairs(3000, 3000), 2);
        const FoldAssignment folds = make_folds(plan, 2);
        REQUIRE(folds.fold_of_pair.size() == 6000u);
        std::array<int, 10> pos{}, neg{};
        for (const PlanRecord& r : plan.records) {
            const int f = folds.fold_of_pair[static_cast<std::size_t>(r.pair_index)];
            REQUIRE(f >= 0);
            REQUIRE(f < 10);
            (r.same_identity ? pos : neg)[static_cast<std::size_t>(f)]++;
        }
        for (int f = 0; f < 10; ++f) {
            CHECK(pos[static_cast<std::size_t>(f)] == 300);
            CHECK(neg[static_cast<std::size_t>(f)] == 300);
        }
    }
    SECTION("fixture scale") {
        const GenerationPlan plan = split_pairs(synthetic_pairs(30, 30), 3);
        const FoldAssignment folds = make_folds(plan, 3);
        std::array<int, 10> pos{}, neg{};
        for (const PlanRecord& r : plan.records)
            (r.same_identity ? pos : neg)[static_cast<std::size_t>(
                folds.fold_of_pair[static_cast<std::size_t>(r.pair_index)])]++;
        for (int f = 0; f < 10; ++f) {
            CHECK(pos[static_cast<std::size_t>(f)] == 3);
            CHECK(neg[static_cast<std::size_t>(f)] == 3);
        }
    }
    SECTION("determinism and indivisibility") {
        const GenerationPlan plan = split_pairs(synthetic_pairs(30, 30), 4);
        CHECK(make_folds(plan, 4).fold_of_pair == make_folds(plan, 4).fold_of_pair);
        const GenerationPlan bad = split_pairs(synthetic_pairs(14, 14), 4);
        CHECK_THROWS_AS(make_folds(bad, 4), std::invalid_argument);
    }
}

TEST_CASE("plan invariants hold across seeds at fixture scale") {
    const std::vector<MaskTemplate> gallery = synthetic::fixture_gallery();
    const PairList pairs = synthetic_pairs(30, 30);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GenerationPlan plan = split_pairs(pairs, seed);
        assign_templates(plan, gallery, seed);
        REQUIRE(plan.records.size() == pairs.entries.size());

        int s1 = 0, s2 = 0, s3 = 0;
        for (const PlanRecord& r : plan.records) {
            switch (r.scenario) {
            case Scenario::one_masked:
                ++s1;
                REQUIRE((r.mask_a != r.mask_b));
                break;
            case Scenario::same_id_different_masks:
                ++s2;
                REQUIRE(r.same_identity);
                REQUIRE(r.template_a != r.template_b);
                break;
            case Scenario::different_id_same_mask:
                ++s3;
                REQUIRE_FALSE(r.same_identity);
                REQUIRE(r.template_a == r.template_b);
                break;
            }
        }
        REQUIRE(s1 == 30);
        REQUIRE(s2 == 15);
        REQUIRE(s3 == 15);
    }
}

TEST_CASE("generate writes artifacts, sidecars and the pairing file") {
    testsup::TempDir dir("generate");
    const auto ids = testsup::write_face_set(dir.path(), 4, 2);
    const PairList pairs = testsup::make_pairs(ids, 4);
    const std::vector<MaskTemplate> gallery = synthetic::fixture_gallery();

    GenerationPlan plan = split_pairs(pairs, 21);
    assign_templates(plan, gallery, 21);

    ComposeParams params;
    params.seed = 21;
    const std::string out_dir = (dir.path() / "out").string();
    const GenerationOutcome outcome =
        generate(plan, (dir.path() / "images").string(), (dir.path() / "landmarks").string(),
                 gallery, params, out_dir, 2);

    CHECK(outcome.failures.empty());
    // 4 one-masked pairs -> 4 images; 2 + 2 double-masked pairs -> 8 images
    REQUIRE(outcome.artifacts.size() == 12u);
    for (const GeneratedArtifact& a : outcome.artifacts) {
        const auto png = std::filesystem::path(out_dir) / "images" / (a.output_name + ".png");
        const auto lmf = std::filesystem::path(out_dir) / "landmarks" / (a.output_name + ".txt");
        REQUIRE(std::filesystem::exists(png));
        REQUIRE(std::filesystem::exists(lmf));
        const ImageBuffer img = read_png(png.string());
        CHECK(img.width == 250);
        CHECK(img.height == 250);
        CHECK_NOTHROW(read_landmarks(lmf.string()));
    }

    // scenario-1 pairs reference the unmasked side by its original name
    const PairList pairing = read_pairs((std::filesystem::path(out_dir) / "pairing.txt").string());
    REQUIRE(pairing.entries.size() == pairs.entries.size());
    for (std::size_t i = 0; i < plan.records.size(); ++i) {
        const PlanRecord& r = plan.records[i];
        if (r.scenario != Scenario::one_masked) continue;
        const std::string unmasked = r.mask_a ? r.name_b : r.name_a;
        const std::string got = r.mask_a ? pairing.entries[i].name_b : pairing.entries[i].name_a;
        CHECK(got == unmasked);
    }

    // manifest parses and lists every artifact
    const auto manifest =
        nlohmann::json::parse(read_text_file((std::filesystem::path(out_dir) / "manifest.json").string()));
    CHECK(manifest.at("artifacts").size() == outcome.artifacts.size());
}

TEST_CASE("generate records missing inputs and keeps building") {
    testsup::TempDir dir("generate_missing");
    const auto ids = testsup::write_face_set(dir.path(), 4, 2);
    const PairList pairs = testsup::make_pairs(ids, 4);
    const std::vector<MaskTemplate> gallery = synthetic::fixture_gallery();

    GenerationPlan plan = split_pairs(pairs, 22);
    assign_templates(plan, gallery, 22);

    // remove one source image
    std::filesystem::remove(dir.path() / "images" / (ids[0][0] + ".png"));

    ComposeParams params;
    params.seed = 22;
    const GenerationOutcome outcome =
        generate(plan, (dir.path() / "images").string(), (dir.path() / "landmarks").string(),
                 gallery, params, (dir.path() / "out").string(), 1);

    CHECK_FALSE(outcome.failures.empty());
    CHECK(outcome.artifacts.size() + outcome.failures.size() == 12u);
    for (const GenerationFailure& f : outcome.failures)
        CHECK(f.message.find(ids[0][0]) != std::string::npos);
}

TEST_CASE("fold files round trip") {
    testsup::TempDir dir("folds");
    const GenerationPlan plan = split_pairs(synthetic_pairs(30, 30), 6);
    const FoldAssignment folds = make_folds(plan, 6);
    const std::string path = (dir.path() / "folds.txt").string();
    write_folds(path, folds);
    const FoldAssignment back = read_folds(path);
    CHECK(back.fold_of_pair == folds.fold_of_pair);
    CHECK(back.fold_count == 10);
}

TEST_CASE("pair list parsing rejects malformed lines") {
    testsup::TempDir dir("pairs");
    const std::string path = (dir.path() / "pairs.txt").string();
    write_text_file(path, "a b 1\nc d 0\n");
    const PairList ok = read_pairs(path);
    REQUIRE(ok.entries.size() == 2u);
    CHECK(ok.entries[0].same_identity);
    CHECK_FALSE(ok.entries[1].same_identity);

    write_text_file(path, "a b 2\n");
    CHECK_THROWS_AS(read_pairs(path), LoadError);
    write_text_file(path, "only_one_token\n");
    CHECK_THROWS_AS(read_pairs(path), LoadError);
    CHECK_THROWS_AS(read_pairs((dir.path() / "missing.txt").string()), LoadError);
}
