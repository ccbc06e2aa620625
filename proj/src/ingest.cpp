#include "loadshape/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

namespace loadshape {

namespace {

constexpr const char* kHeader = "household_id,date,hour,kwh";

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

ParseResult parse_readings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        if (in.bad()) throw InputError("unreadable input stream");
        throw InputError("empty input: expected header '" + std::string(kHeader) + "'");
    }
    strip_cr(line);
    if (line != kHeader) {
        throw InputError("bad header: expected '" + std::string(kHeader) + "', got '" + line +
                         "'");
    }

    ParseResult result;
    std::set<std::tuple<std::string, Date, int>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;

        const auto reject = [&](std::string reason) {
            result.diagnostics.push_back({line_no, std::move(reason)});
        };

        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            reject("expected 4 fields, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty()) {
            reject("empty household_id");
            continue;
        }

        const auto date = parse_date(fields[1]);
        if (!date) {
            reject("invalid date '" + std::string(fields[1]) + "'");
            continue;
        }

        int hour = -1;
        {
            const auto* first = fields[2].data();
            const auto* last = first + fields[2].size();
            auto [ptr, ec] = std::from_chars(first, last, hour);
            if (ec != std::errc{} || ptr != last) {
                reject("invalid hour '" + std::string(fields[2]) + "'");
                continue;
            }
        }
        if (hour < 0 || hour >= static_cast<int>(kHoursPerDay)) {
            reject("hour out of range");
            continue;
        }

        std::optional<double> kwh;
        if (!fields[3].empty()) {
            double value = 0.0;
            const auto* first = fields[3].data();
            const auto* last = first + fields[3].size();
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last) {
                reject("invalid kwh '" + std::string(fields[3]) + "'");
                continue;
            }
            if (!std::isfinite(value)) {
                reject("non-finite kwh");
                continue;
            }
            if (value < 0.0) {
                reject("negative kwh");
                continue;
            }
            kwh = value;
        }

        auto key = std::make_tuple(std::string(fields[0]), *date, hour);
        if (!seen.insert(std::move(key)).second) {
            reject("duplicate reading for (household, date, hour)");
            continue;
        }
        result.rows.push_back({std::string(fields[0]), *date, hour, kwh});
    }
    if (in.bad()) throw InputError("unreadable input stream");
    return result;
}

std::vector<HourlyDay> assemble_days(const std::vector<RawReadingRow>& rows) {
    std::map<std::pair<std::string, Date>, HourlyDay> days;
    for (const auto& row : rows) {
        auto& day = days[{row.household_id, row.date}];
        if (day.household_id.empty()) {
            day.household_id = row.household_id;
            day.date = row.date;
        }
        day.readings[static_cast<std::size_t>(row.hour)] = row.kwh;
    }
    std::vector<HourlyDay> out;
    out.reserve(days.size());
    for (auto& [key, day] : days) out.push_back(std::move(day));
    return out;
}

CleanResult drop_incomplete_days(const std::vector<HourlyDay>& days) {
    CleanResult result;
    for (const auto& day : days) {
        if (day.complete()) {
            result.kept.push_back(day);
        } else {
            ++result.dropped[day.household_id];
        }
    }
    return result;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<RowDiagnostic>& diagnostics) {
    out << "line,reason\n";
    for (const auto& d : diagnostics) {
        // Reasons never contain commas by construction; quote anyway if needed.
        if (d.reason.find(',') != std::string::npos || d.reason.find('"') != std::string::npos) {
            std::string quoted = "\"";
            for (char c : d.reason) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            quoted += '"';
            out << d.line << ',' << quoted << '\n';
        } else {
            out << d.line << ',' << d.reason << '\n';
        }
    }
}

void write_readings_csv(std::ostream& out, const std::vector<RawReadingRow>& rows) {
    out << kHeader << '\n';
    char buf[32];
    for (const auto& row : rows) {
        out << row.household_id << ',' << format_date(row.date) << ',' << row.hour << ',';
        if (row.kwh) {
            std::snprintf(buf, sizeof(buf), "%.6f", *row.kwh);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace loadshape
