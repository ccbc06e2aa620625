#include <doctest.h>

#include <algorithm>
#include <set>

#include "loadshape/rng.hpp"
#include "loadshape/synth.hpp"
#include "loadshape/two_stage.hpp"

using namespace loadshape;

namespace {

Vector24 constant(double v) {
    Vector24 out{};
    out.fill(v);
    return out;
}

std::vector<MeanLoadProfile> archetype_samples(std::size_t n_groups, std::size_t per_group,
                                               double sd, std::uint64_t seed,
                                               std::vector<std::size_t>* truth = nullptr) {
    const auto archetypes = default_archetypes();
    Rng rng(seed);
    std::vector<MeanLoadProfile> profiles;
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t i = 0; i < per_group; ++i) {
            MeanLoadProfile p;
            p.household_id = "H" + std::to_string(profiles.size() + 100);
            for (std::size_t h = 0; h < kHoursPerDay; ++h) {
                p.values[h] = std::clamp(
                    archetypes[g].base_shape[h] + rng.gaussian(0.0, sd), 0.0, 1.0);
            }
            profiles.push_back(std::move(p));
            if (truth) truth->push_back(g);
        }
    }
    return profiles;
}

}  // namespace

TEST_SUITE("two_stage") {

TEST_CASE("a grid of repeated archetypes maps households with their archetype") {
    // Codebooks equal to 3 distinct archetypes, each repeated across the grid.
    const auto archetypes = default_archetypes();
    SomGrid grid;
    grid.width = 3;
    grid.height = 2;
    for (std::size_t j = 0; j < 6; ++j) grid.codebooks.push_back(archetypes[j % 3].base_shape);

    std::vector<std::size_t> truth;
    const auto profiles = archetype_samples(3, 4, 0.005, 62, &truth);

    KmeansParams params;
    params.k = 3;
    params.n_restarts = 50;
    params.base_seed = 7;
    const auto ts = two_stage_from_grid(profiles, grid, params);

    // Kmeans over the codebooks must group the repeats: nodes carrying the
    // same archetype land in the same final cluster.
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(ts.node_cluster[j] == ts.node_cluster[j % 3]);
    }
    std::vector<std::size_t> assigned;
    for (const auto& p : profiles) assigned.push_back(ts.result.assignments.at(p.household_id));
    CHECK(adjusted_rand_index(assigned, truth) == doctest::Approx(1.0));
}

TEST_CASE("identical households collapse into one final cluster") {
    std::vector<MeanLoadProfile> profiles(9);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].household_id = "H" + std::to_string(i);
        profiles[i].values = constant(0.4);
    }
    TwoStageParams params;
    params.som = SomParams{.width = 4, .height = 3, .epochs = 10, .seed = 2};
    params.kmeans.k = 3;
    params.kmeans.n_restarts = 10;
    const auto ts = two_stage_cluster(profiles, params);
    const auto sizes = ts.result.cluster_sizes();
    CHECK(sizes[0] == profiles.size());
    for (std::size_t c = 1; c < sizes.size(); ++c) CHECK(sizes[c] == 0);
}

TEST_CASE("pass-through consistency: household cluster equals its node's cluster") {
    std::vector<std::size_t> truth;
    const auto profiles = archetype_samples(5, 8, 0.03, 19);
    TwoStageParams params;
    params.som = SomParams{.width = 6, .height = 4, .epochs = 60, .seed = 3};
    params.kmeans.k = 5;
    params.kmeans.n_restarts = 40;
    params.kmeans.base_seed = 11;
    const auto ts = two_stage_cluster(profiles, params);

    for (const auto& p : profiles) {
        const std::size_t node = bmu(ts.grid, p.values);
        CHECK(ts.result.assignments.at(p.household_id) == ts.node_cluster[node]);
    }

    // Dimension-reduction sanity.
    std::set<std::size_t> non_empty_nodes;
    for (const auto& p : profiles) non_empty_nodes.insert(bmu(ts.grid, p.values));
    const auto sizes = ts.result.cluster_sizes();
    const std::size_t non_empty_final =
        static_cast<std::size_t>(std::count_if(sizes.begin(), sizes.end(),
                                               [](std::size_t s) { return s > 0; }));
    CHECK(non_empty_final <= std::min<std::size_t>(params.kmeans.k, non_empty_nodes.size()));
}

TEST_CASE("two-stage runs are deterministic end to end") {
    const auto profiles = archetype_samples(4, 6, 0.02, 41);
    TwoStageParams params;
    params.som = SomParams{.width = 5, .height = 3, .epochs = 30, .seed = 6};
    params.kmeans.k = 4;
    params.kmeans.n_restarts = 25;
    params.kmeans.base_seed = 17;
    const auto a = two_stage_cluster(profiles, params);
    const auto b = two_stage_cluster(profiles, params);
    CHECK(a.result.assignments == b.result.assignments);
    CHECK(a.result.centroids == b.result.centroids);
    CHECK(a.node_cluster == b.node_cluster);
    CHECK(a.grid.codebooks == b.grid.codebooks);
}

TEST_CASE("final centroids are household member means") {
    const auto profiles = archetype_samples(3, 7, 0.02, 83);
    TwoStageParams params;
    params.som = SomParams{.width = 4, .height = 3, .epochs = 40, .seed = 9};
    params.kmeans.k = 3;
    params.kmeans.n_restarts = 20;
    const auto ts = two_stage_cluster(profiles, params);
    std::vector<Vector24> sums(3, Vector24{});
    std::vector<std::size_t> counts(3, 0);
    for (const auto& p : profiles) {
        const std::size_t c = ts.result.assignments.at(p.household_id);
        ++counts[c];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) sums[c][h] += p.values[h];
    }
    for (std::size_t c = 0; c < 3; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            CHECK(std::abs(ts.result.centroids[c][h] - sums[c][h] / counts[c]) <= 1e-9);
        }
    }
}

TEST_CASE("weighted stage 2 is available and keeps the pass-through exact") {
    const auto profiles = archetype_samples(3, 10, 0.02, 29);
    TwoStageParams params;
    params.som = SomParams{.width = 5, .height = 4, .epochs = 50, .seed = 13};
    params.kmeans.k = 3;
    params.kmeans.n_restarts = 30;
    params.weight_by_population = true;
    const auto ts = two_stage_cluster(profiles, params);
    CHECK(ts.result.params.at("weighted") == "true");
    for (const auto& p : profiles) {
        const std::size_t node = bmu(ts.grid, p.values);
        CHECK(ts.result.assignments.at(p.household_id) == ts.node_cluster[node]);
    }
    std::size_t total = 0;
    for (std::size_t s : ts.result.cluster_sizes()) total += s;
    CHECK(total == profiles.size());
}

TEST_CASE("k larger than the household count is rejected") {
    const auto profiles = archetype_samples(2, 2, 0.01, 3);
    TwoStageParams params;
    params.kmeans.k = 5;
    CHECK_THROWS_AS(two_stage_cluster(profiles, params), InputError);
}

TEST_CASE("compare_methods reports all three methods and flags the minimum MIA") {
    std::vector<MeanLoadProfile> profiles(12);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].household_id = "H" + std::to_string(i);
        profiles[i].values = constant(0.7);  // identical: MIA 0 everywhere
    }
    CompareConfig config;
    config.k = 3;
    config.kmeans.n_restarts = 10;
    config.som = SomParams{.width = 2, .height = 2, .epochs = 10, .seed = 1};
    config.two_stage.som = SomParams{.width = 3, .height = 2, .epochs = 10, .seed = 1};
    config.two_stage.kmeans.n_restarts = 10;

    const auto cmp = compare_methods(profiles, config);
    REQUIRE(cmp.methods.size() == 3);
    CHECK(cmp.methods[0].method == Method::Kmeans);
    CHECK(cmp.methods[1].method == Method::Som);
    CHECK(cmp.methods[2].method == Method::TwoStage);
    for (const auto& m : cmp.methods) {
        CHECK(m.mia == doctest::Approx(0.0).epsilon(1e-12));
        std::size_t total = 0;
        for (std::size_t s : m.sizes) total += s;
        CHECK(total == profiles.size());
    }
    CHECK(cmp.best_index == 0);  // ties keep method order
    CHECK(cmp.som_grid.node_count() == 4);
    CHECK(cmp.two_stage_grid.node_count() == 6);
}

}  // TEST_SUITE
