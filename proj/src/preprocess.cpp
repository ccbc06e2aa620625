#include "loadshape/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

namespace loadshape {

LoadProfile normalize_day(const HourlyDay& day) {
    if (!day.complete()) {
        throw ContractError("normalize_day requires a complete day (" + day.household_id + " " +
                            format_date(day.date) + ")");
    }
    double max = 0.0;
    for (const auto& r : day.readings) max = std::max(max, *r);
    if (max <= 0.0) {
        throw ContractError("degenerate day: all readings zero (" + day.household_id + " " +
                            format_date(day.date) + ")");
    }
    LoadProfile profile;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) profile.values[h] = *day.readings[h] / max;
    return profile;
}

Stratum stratify(const Date& date) {
    const unsigned month = static_cast<unsigned>(date.month());
    const Season season = (month >= 11 || month <= 4) ? Season::Winter : Season::Summer;
    const std::chrono::weekday wd = weekday_of(date);
    const DayType day_type = (wd == std::chrono::Saturday || wd == std::chrono::Sunday)
                                 ? DayType::Weekend
                                 : DayType::Weekday;
    return {season, day_type};
}

MeanLoadProfile mean_profile(const std::string& household_id,
                             const std::vector<std::pair<Stratum, LoadProfile>>& profiles,
                             Stratum target) {
    MeanLoadProfile mean;
    mean.household_id = household_id;
    mean.stratum = target;
    mean.values.fill(0.0);
    for (const auto& [stratum, profile] : profiles) {
        if (stratum != target) continue;
        for (std::size_t h = 0; h < kHoursPerDay; ++h) mean.values[h] += profile.values[h];
        ++mean.n_days;
    }
    if (mean.n_days == 0) {
        throw ContractError("household excluded: " + household_id + " has no valid day in " +
                            stratum_name(target));
    }
    for (auto& v : mean.values) v /= static_cast<double>(mean.n_days);
    return mean;
}

PreprocessOutput build_mean_profiles(const std::vector<HourlyDay>& days, Stratum target) {
    PreprocessOutput out;
    std::map<std::string, std::vector<std::pair<Stratum, LoadProfile>>> per_household;
    for (const auto& day : days) {
        if (!day.complete()) {
            throw ContractError("build_mean_profiles expects cleaned days; " + day.household_id +
                                " " + format_date(day.date) + " has missing readings");
        }
        double max = 0.0;
        for (const auto& r : day.readings) max = std::max(max, *r);
        auto& profiles = per_household[day.household_id];  // registers the household
        if (max <= 0.0) {
            out.degenerate_days.push_back({day.household_id, day.date, "degenerate day"});
            continue;
        }
        profiles.emplace_back(stratify(day.date), normalize_day(day));
    }
    for (const auto& [id, profiles] : per_household) {
        const bool any_match = std::any_of(profiles.begin(), profiles.end(),
                                           [&](const auto& p) { return p.first == target; });
        if (!any_match) {
            out.excluded_households.push_back(id);
            continue;
        }
        out.profiles.push_back(mean_profile(id, profiles, target));
    }
    return out;
}

void write_mean_profiles_csv(std::ostream& out, const std::vector<MeanLoadProfile>& profiles) {
    out << "household_id,n_days";
    for (std::size_t h = 0; h < kHoursPerDay; ++h) out << ",h" << h;
    out << '\n';
    char buf[32];
    for (const auto& p : profiles) {
        out << p.household_id << ',' << p.n_days;
        for (double v : p.values) {
            std::snprintf(buf, sizeof(buf), "%.6f", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::vector<MeanLoadProfile> read_mean_profiles_csv(std::istream& in, Stratum stratum) {
    std::vector<MeanLoadProfile> profiles;
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty mean-profile CSV");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        MeanLoadProfile p;
        p.stratum = stratum;
        std::size_t start = 0;
        std::size_t field = 0;
        bool bad = false;
        while (start <= line.size() && field < kHoursPerDay + 2) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view f(line.data() + start, comma - start);
            if (field == 0) {
                p.household_id = std::string(f);
            } else {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
                if (ec != std::errc{} || ptr != f.data() + f.size()) {
                    bad = true;
                    break;
                }
                if (field == 1) {
                    p.n_days = static_cast<std::size_t>(v);
                } else {
                    p.values[field - 2] = v;
                }
            }
            ++field;
            start = comma + 1;
        }
        if (bad || field != kHoursPerDay + 2 || p.household_id.empty()) {
            throw InputError("malformed mean-profile CSV row: " + line);
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

}  // namespace loadshape
