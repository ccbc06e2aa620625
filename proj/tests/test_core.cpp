#include <doctest.h>

#include <cmath>

#include "loadshape/core.hpp"

using namespace loadshape;

TEST_SUITE("core") {

TEST_CASE("date parsing accepts valid ISO dates and rejects the rest") {
    const auto d = parse_date("1990-01-06");
    REQUIRE(d.has_value());
    CHECK(format_date(*d) == "1990-01-06");
    CHECK(weekday_of(*d) == std::chrono::Saturday);

    CHECK_FALSE(parse_date("1990-02-30").has_value());
    CHECK_FALSE(parse_date("1990-13-01").has_value());
    CHECK_FALSE(parse_date("19900101").has_value());
    CHECK_FALSE(parse_date("1990-1-1").has_value());
    CHECK_FALSE(parse_date("not-a-date").has_value());
    CHECK_FALSE(parse_date("").has_value());
}

TEST_CASE("leap days parse only in leap years") {
    CHECK(parse_date("1988-02-29").has_value());
    CHECK_FALSE(parse_date("1989-02-29").has_value());
}

TEST_CASE("stratum names round-trip bijectively") {
    int seen = 0;
    for (Season season : {Season::Winter, Season::Summer}) {
        for (DayType day_type : {DayType::Weekday, DayType::Weekend}) {
            const Stratum s{season, day_type};
            const auto back = parse_stratum(stratum_name(s));
            REQUIRE(back.has_value());
            CHECK(*back == s);
            ++seen;
        }
    }
    CHECK(seen == 4);
    CHECK_FALSE(parse_stratum("spring-weekend").has_value());
}

TEST_CASE("hexagonal node distances") {
    CHECK(hex_node_distance({0, 0}, {0, 0}, 3, 3) == 0.0);
    CHECK(hex_node_distance({0, 0}, {1, 0}, 3, 3) == doctest::Approx(1.0).epsilon(1e-12));
    // adjacent rows: sqrt(0.25 + 0.75)
    CHECK(hex_node_distance({0, 0}, {0, 1}, 3, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(hex_node_distance({3, 0}, {0, 0}, 3, 3), std::out_of_range);
    CHECK_THROWS_AS(hex_node_distance({0, 0}, {0, -1}, 3, 3), std::out_of_range);
}

TEST_CASE("every interior node has exactly six neighbors at distance 1") {
    const int w = 6, h = 6;
    for (int row = 1; row < h - 1; ++row) {
        for (int col = 1; col < w - 1; ++col) {
            int at_unit = 0;
            for (int r2 = 0; r2 < h; ++r2) {
                for (int c2 = 0; c2 < w; ++c2) {
                    if (r2 == row && c2 == col) continue;
                    const double d = hex_node_distance({col, row}, {c2, r2}, w, h);
                    if (std::abs(d - 1.0) <= 1e-9) ++at_unit;
                }
            }
            CHECK(at_unit == 6);
        }
    }
}

TEST_CASE("SomGrid index/coord round-trip") {
    SomGrid grid;
    grid.width = 10;
    grid.height = 7;
    grid.codebooks.resize(70);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        CHECK(grid.index_of(grid.coord_of(i)) == i);
    }
    CHECK_THROWS_AS(grid.coord_of(70), std::out_of_range);
    CHECK_THROWS_AS(grid.index_of({10, 0}), std::out_of_range);
}

TEST_CASE("canonical display order sorts by size then centroid") {
    ClusteringResult r;
    r.k = 3;
    r.centroids = {Vector24{}, Vector24{}, Vector24{}};
    r.centroids[0].fill(0.9);
    r.centroids[1].fill(0.1);
    r.centroids[2].fill(0.5);
    r.empty = {false, false, true};
    r.assignments = {{"A", 0}, {"B", 1}, {"C", 1}};

    const auto canon = canonical_display_order(r);
    // cluster 1 (2 members) first, then cluster 0 (1 member), then the empty one
    CHECK(canon.assignments.at("B") == 0);
    CHECK(canon.assignments.at("C") == 0);
    CHECK(canon.assignments.at("A") == 1);
    CHECK(canon.centroids[0][0] == doctest::Approx(0.1));
    CHECK(canon.centroids[1][0] == doctest::Approx(0.9));
    CHECK(canon.empty[2]);

    const auto sizes = canon.cluster_sizes();
    CHECK(sizes == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("canonical display order breaks size ties by lexicographic centroid") {
    ClusteringResult r;
    r.k = 2;
    r.centroids = {Vector24{}, Vector24{}};
    r.centroids[0].fill(0.7);
    r.centroids[1].fill(0.2);
    r.empty = {false, false};
    r.assignments = {{"A", 0}, {"B", 1}};
    const auto canon = canonical_display_order(r);
    CHECK(canon.centroids[0][0] == doctest::Approx(0.2));
    CHECK(canon.assignments.at("B") == 0);
}

}  // TEST_SUITE
