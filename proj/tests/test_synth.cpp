#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "loadshape/ingest.hpp"
#include "loadshape/kmeans.hpp"
#include "loadshape/preprocess.hpp"
#include "loadshape/rng.hpp"
#include "loadshape/synth.hpp"

using namespace loadshape;

TEST_SUITE("synth") {

TEST_CASE("the default archetype library is normalized and well separated") {
    const auto archetypes = default_archetypes();
    REQUIRE(archetypes.size() == 9);
    for (const auto& a : archetypes) {
        const double max = *std::max_element(a.base_shape.begin(), a.base_shape.end());
        const double min = *std::min_element(a.base_shape.begin(), a.base_shape.end());
        CHECK(max == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(min >= 0.0);
    }
    for (std::size_t i = 0; i < archetypes.size(); ++i) {
        for (std::size_t j = i + 1; j < archetypes.size(); ++j) {
            const double d =
                euclidean_distance(archetypes[i].base_shape, archetypes[j].base_shape);
            CHECK(d > 0.8);  // separation the recovery tests rely on
        }
    }
}

TEST_CASE("generation is deterministic per seed") {
    SynthConfig config;
    config.n_households = 8;
    config.days_range = {3, 6};
    const auto archetypes = default_archetypes(0.05);

    std::ostringstream a, b, c;
    const auto labels_a = generate_dataset(a, archetypes, config);
    const auto labels_b = generate_dataset(b, archetypes, config);
    CHECK(a.str() == b.str());
    CHECK(labels_a == labels_b);

    config.seed = 43;
    generate_dataset(c, archetypes, config);
    CHECK(a.str() != c.str());
}

TEST_CASE("with missing_rate 0 every generated day survives cleaning") {
    SynthConfig config;
    config.n_households = 6;
    config.days_range = {4, 8};
    config.missing_rate = 0.0;
    std::ostringstream csv;
    generate_dataset(csv, default_archetypes(0.05), config);

    std::istringstream in(csv.str());
    const auto parsed = parse_readings(in);
    CHECK(parsed.diagnostics.empty());
    const auto days = assemble_days(parsed.rows);
    const auto clean = drop_incomplete_days(days);
    CHECK(clean.kept.size() == days.size());
    CHECK(clean.dropped.empty());
}

TEST_CASE("missing_rate > 0 injects missing readings") {
    SynthConfig config;
    config.n_households = 10;
    config.days_range = {10, 20};
    config.missing_rate = 0.05;
    std::ostringstream csv;
    generate_dataset(csv, default_archetypes(0.05), config);

    std::istringstream in(csv.str());
    const auto parsed = parse_readings(in);
    std::size_t missing = 0;
    for (const auto& row : parsed.rows) {
        if (!row.kwh) ++missing;
    }
    const double rate = static_cast<double>(missing) / static_cast<double>(parsed.rows.size());
    CHECK(rate > 0.02);
    CHECK(rate < 0.10);
}

TEST_CASE("zero noise and a fixed scale reproduce the base shape") {
    auto archetypes = default_archetypes(0.0);
    archetypes.resize(2);
    for (auto& a : archetypes) a.scale_range = {2.0, 2.0};
    SynthConfig config;
    config.n_households = 4;
    config.days_range = {2, 3};
    std::ostringstream csv;
    const auto labels = generate_dataset(csv, archetypes, config);

    std::map<std::string, std::string> label_of(labels.begin(), labels.end());
    std::map<std::string, Vector24> shape_of;
    for (const auto& a : archetypes) shape_of[a.name] = a.base_shape;

    std::istringstream in(csv.str());
    const auto days = drop_incomplete_days(assemble_days(parse_readings(in).rows)).kept;
    REQUIRE(!days.empty());
    for (const auto& day : days) {
        const auto profile = normalize_day(day);
        const auto& shape = shape_of.at(label_of.at(day.household_id));
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            // The CSV wire format quantizes kwh to 6 decimals, so the exact
            // expectation is round(2 * shape, 1e-6) / 2.
            const double quantized = std::round(shape[h] * 2.0 * 1e6) / 1e6;
            CHECK(std::abs(profile.values[h] - quantized / 2.0) <= 1e-12);
            CHECK(std::abs(profile.values[h] - shape[h]) <= 1e-6);
        }
    }
}

TEST_CASE("archetype assignment is round-robin balanced") {
    SynthConfig config;
    config.n_households = 18;
    config.days_range = {2, 2};
    std::ostringstream csv;
    const auto labels = generate_dataset(csv, default_archetypes(0.05), config);
    std::map<std::string, int> counts;
    for (const auto& [id, name] : labels) ++counts[name];
    REQUIRE(counts.size() == 9);
    for (const auto& [name, n] : counts) CHECK(n == 2);
}

TEST_CASE("generator rejects invalid parameters") {
    std::ostringstream csv;
    SynthConfig config;
    CHECK_THROWS_AS(generate_dataset(csv, {}, config), InputError);
    config.missing_rate = 1.0;
    CHECK_THROWS_AS(generate_dataset(csv, default_archetypes(), config), InputError);
    config.missing_rate = 0.0;
    config.days_range = {5, 4};
    CHECK_THROWS_AS(generate_dataset(csv, default_archetypes(), config), InputError);
    config.days_range = {25, 111};
    auto bad_shape = default_archetypes();
    bad_shape[0].base_shape.fill(0.5);
    CHECK_THROWS_AS(generate_dataset(csv, bad_shape, config), InputError);
}

TEST_CASE("brute force frozen values") {
    // n = k distinct points: singletons, zero WCSS.
    std::vector<Vector24> three(3, Vector24{});
    three[1][0] = 1.0;
    three[2][1] = 1.0;
    const auto singletons = brute_force_kmeans(three, 3);
    CHECK(singletons.wcss == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(singletons.partition == std::vector<std::size_t>{0, 1, 2});

    std::vector<Vector24> one(1, Vector24{});
    const auto trivial = brute_force_kmeans(one, 1);
    CHECK(trivial.wcss == 0.0);
    CHECK(trivial.partition == std::vector<std::size_t>{0});

    // The 4-point pairs instance: 0.1^2/2 + 0.1^2/2 = 0.01.
    std::vector<Vector24> four(4, Vector24{});
    four[1][0] = 0.1;
    four[2][0] = 1.0;
    four[2][1] = 1.0;
    four[3][0] = 0.9;
    four[3][1] = 1.0;
    const auto pairs = brute_force_kmeans(four, 2);
    CHECK(pairs.wcss == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(pairs.partition == std::vector<std::size_t>{0, 0, 1, 1});
}

TEST_CASE("the enumeration guard rejects large instances") {
    std::vector<Vector24> points(13, Vector24{});
    CHECK_THROWS_AS(brute_force_kmeans(points, 2), InputError);
    points.resize(5);
    CHECK_THROWS_AS(brute_force_kmeans(points, 4), InputError);
}

TEST_CASE("the oracle dominates heuristic runs") {
    Rng rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vector24> points(7);
        for (auto& p : points) {
            for (auto& v : p) v = rng.uniform_real(0.0, 1.0);
        }
        const auto oracle = brute_force_kmeans(points, 3);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto run = lloyd(points, 3, seed);
            CHECK(oracle.wcss <= run.wcss + 1e-12);
        }
    }
}

TEST_CASE("adjusted Rand index frozen values") {
    const std::vector<std::size_t> a{0, 0, 1, 1};
    CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0));

    const std::vector<std::size_t> relabeled{1, 1, 0, 0};
    CHECK(adjusted_rand_index(a, relabeled) == doctest::Approx(1.0));

    // Hand evaluation: all contingency cells are 1, giving ARI = -0.5.
    const std::vector<std::size_t> crossed{0, 1, 0, 1};
    CHECK(adjusted_rand_index(a, crossed) == doctest::Approx(-0.5).epsilon(1e-12));

    const std::vector<std::size_t> shorter{0, 1};
    CHECK_THROWS_AS(adjusted_rand_index(a, shorter), ContractError);
}

TEST_CASE("labels CSV format") {
    GroundTruth labels{{"H001", "flat"}, {"H002", "twin-peak"}};
    std::ostringstream out;
    write_labels_csv(out, labels);
    CHECK(out.str() == "household_id,archetype\nH001,flat\nH002,twin-peak\n");
}

}  // TEST_SUITE
