// CSV ingestion of raw hourly readings and the cleaning rule that drops any
// day with a missing hourly reading.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loadshape/core.hpp"

namespace loadshape {

struct RawReadingRow {
    std::string household_id;
    Date date{};
    int hour = 0;                      // 0..23
    std::optional<double> kwh;         // disengaged = missing reading
};

struct RowDiagnostic {
    std::size_t line = 0;              // 1-based, header is line 1
    std::string reason;
};

struct ParseResult {
    std::vector<RawReadingRow> rows;
    std::vector<RowDiagnostic> diagnostics;
};

/// Parses the `household_id,date,hour,kwh` schema. Rejected rows become
/// diagnostics; duplicate (household, date, hour) keys keep the first
/// occurrence. Throws InputError on a missing/incorrect header or a broken
/// stream.
ParseResult parse_readings(std::istream& in);

/// Groups rows into one HourlyDay per (household, date); hours without a row
/// stay missing. Output is sorted by household id, then date.
std::vector<HourlyDay> assemble_days(const std::vector<RawReadingRow>& rows);

struct CleanResult {
    std::vector<HourlyDay> kept;
    std::map<std::string, std::size_t> dropped;  // households with >= 1 dropped day
};

/// The cleaning rule: a day survives only with all 24 readings present.
CleanResult drop_incomplete_days(const std::vector<HourlyDay>& days);

/// Sidecar diagnostics report, `line,reason`.
void write_diagnostics_csv(std::ostream& out, const std::vector<RowDiagnostic>& diagnostics);

/// Re-serializes rows in the input schema (kwh at 6 decimals, empty when
/// missing).
void write_readings_csv(std::ostream& out, const std::vector<RawReadingRow>& rows);

}  // namespace loadshape
