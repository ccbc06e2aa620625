#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "loadshape/ingest.hpp"
#include "loadshape/rng.hpp"

using namespace loadshape;

namespace {

ParseResult parse(const std::string& text) {
    std::istringstream in(text);
    return parse_readings(in);
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("a well-formed row round-trips") {
    const auto result = parse("household_id,date,hour,kwh\nH001,1990-01-06,7,0.42\n");
    REQUIRE(result.rows.size() == 1);
    CHECK(result.diagnostics.empty());
    const auto& row = result.rows[0];
    CHECK(row.household_id == "H001");
    CHECK(format_date(row.date) == "1990-01-06");
    CHECK(row.hour == 7);
    REQUIRE(row.kwh.has_value());
    CHECK(*row.kwh == doctest::Approx(0.42));
}

TEST_CASE("hour out of range is rejected with a diagnostic") {
    const auto result = parse("household_id,date,hour,kwh\nH001,1990-01-06,24,0.42\n");
    CHECK(result.rows.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].line == 2);
    CHECK(result.diagnostics[0].reason == "hour out of range");
}

TEST_CASE("an empty kwh field is a missing reading") {
    const auto result = parse("household_id,date,hour,kwh\nH001,1990-01-06,7,\n");
    REQUIRE(result.rows.size() == 1);
    CHECK_FALSE(result.rows[0].kwh.has_value());
    CHECK(result.diagnostics.empty());
}

TEST_CASE("malformed rows are diagnosed with their line numbers") {
    const auto result = parse(
        "household_id,date,hour,kwh\n"
        "H001,1990-01-06,7,0.42\n"
        "H001,1990-02-30,7,0.42\n"   // bad date
        "H001,1990-01-06,x,0.42\n"   // bad hour
        "H001,1990-01-06,8,-1.5\n"   // negative kwh
        "H001,1990-01-06,9,abc\n"    // bad kwh
        ",1990-01-06,9,0.1\n"        // empty id
        "H001,1990-01-06\n");        // too few fields
    CHECK(result.rows.size() == 1);
    REQUIRE(result.diagnostics.size() == 6);
    CHECK(result.diagnostics[0].line == 3);
    CHECK(result.diagnostics[2].reason == "negative kwh");
    CHECK(result.diagnostics[5].line == 8);
}

TEST_CASE("duplicate (household, date, hour) keeps the first occurrence") {
    const auto result = parse(
        "household_id,date,hour,kwh\n"
        "H001,1990-01-06,7,0.42\n"
        "H001,1990-01-06,7,0.99\n");
    REQUIRE(result.rows.size() == 1);
    CHECK(*result.rows[0].kwh == doctest::Approx(0.42));
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].line == 3);
}

TEST_CASE("a missing or wrong header is fatal") {
    std::istringstream wrong("id,date,hour,kwh\nH001,1990-01-06,7,0.42\n");
    CHECK_THROWS_AS(parse_readings(wrong), InputError);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_readings(empty), InputError);
}

TEST_CASE("a broken stream is an I/O error") {
    std::istringstream in("household_id,date,hour,kwh\n");
    in.setstate(std::ios::badbit);
    CHECK_THROWS_AS(parse_readings(in), InputError);
}

TEST_CASE("assemble_days groups rows into household-days") {
    std::string text = "household_id,date,hour,kwh\n";
    for (int h = 0; h < 24; ++h) {
        text += "H001,1990-01-06," + std::to_string(h) + ",1.0\n";
    }
    for (int h = 0; h < 24; ++h) {
        if (h == 13) continue;
        text += "H001,1990-01-07," + std::to_string(h) + ",1.0\n";
    }
    text += "H002,1990-01-06,0,2.0\n";

    const auto days = assemble_days(parse(text).rows);
    REQUIRE(days.size() == 3);
    CHECK(days[0].household_id == "H001");
    CHECK(days[0].complete());
    CHECK(days[1].missing_count() == 1);
    CHECK_FALSE(days[1].readings[13].has_value());
    CHECK(days[2].household_id == "H002");
    CHECK(days[2].missing_count() == 23);
}

TEST_CASE("drop_incomplete_days partitions the input") {
    HourlyDay complete;
    complete.household_id = "H001";
    complete.date = *parse_date("1990-01-06");
    for (auto& r : complete.readings) r = 1.0;

    HourlyDay incomplete = complete;
    incomplete.date = *parse_date("1990-01-07");
    incomplete.readings[5].reset();

    const auto clean = drop_incomplete_days({complete, incomplete, complete});
    CHECK(clean.kept.size() == 2);
    REQUIRE(clean.dropped.size() == 1);
    CHECK(clean.dropped.at("H001") == 1);

    std::size_t dropped_total = 0;
    for (const auto& [id, n] : clean.dropped) dropped_total += n;
    CHECK(clean.kept.size() + dropped_total == 3);

    for (const auto& day : clean.kept) CHECK(day.complete());
}

TEST_CASE("drop_incomplete_days on empty input") {
    const auto clean = drop_incomplete_days({});
    CHECK(clean.kept.empty());
    CHECK(clean.dropped.empty());
}

TEST_CASE("parse then re-serialize is lossless for the row tuples") {
    // Random rows quantized to the 6-decimal wire format.
    Rng rng(7);
    std::vector<RawReadingRow> rows;
    for (int i = 0; i < 300; ++i) {
        RawReadingRow row;
        row.household_id = "H" + std::to_string(1 + rng.uniform_index(40));
        row.date = *parse_date("1990-01-0" + std::to_string(1 + rng.uniform_index(9)));
        row.hour = static_cast<int>(rng.uniform_index(24));
        if (rng.uniform_index(10) > 0) {
            row.kwh = std::round(rng.uniform_real(0.0, 12.0) * 1e6) / 1e6;
        }
        rows.push_back(row);
    }

    std::ostringstream first;
    write_readings_csv(first, rows);
    std::istringstream back(first.str());
    const auto reparsed = parse_readings(back);

    // Duplicates collapse to the first occurrence; compare against the same rule.
    std::set<std::tuple<std::string, Date, int>> seen;
    std::vector<RawReadingRow> expected;
    for (const auto& row : rows) {
        if (seen.insert({row.household_id, row.date, row.hour}).second) expected.push_back(row);
    }
    REQUIRE(reparsed.rows.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(reparsed.rows[i].household_id == expected[i].household_id);
        CHECK(reparsed.rows[i].date == expected[i].date);
        CHECK(reparsed.rows[i].hour == expected[i].hour);
        CHECK(reparsed.rows[i].kwh.has_value() == expected[i].kwh.has_value());
        if (expected[i].kwh) CHECK(*reparsed.rows[i].kwh == *expected[i].kwh);
    }

    std::ostringstream second;
    write_readings_csv(second, reparsed.rows);
    std::istringstream back2(second.str());
    CHECK(parse_readings(back2).rows.size() == reparsed.rows.size());
}

}  // TEST_SUITE
