// Peak normalization, season/day-type stratification and per-household mean
// load profiles.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "loadshape/core.hpp"

namespace loadshape {

/// Scales a complete day so its maximum reading becomes exactly 1. Throws
/// ContractError for incomplete days and for all-zero ("degenerate") days,
/// whose shape is undefined.
LoadProfile normalize_day(const HourlyDay& day);

/// Winter is Nov-Apr, summer the rest; weekend is Saturday/Sunday.
Stratum stratify(const Date& date);

/// Hour-wise arithmetic mean over the profiles matching the target stratum.
/// Throws ContractError (naming the household) when none match.
MeanLoadProfile mean_profile(const std::string& household_id,
                             const std::vector<std::pair<Stratum, LoadProfile>>& profiles,
                             Stratum target);

struct DayDiagnostic {
    std::string household_id;
    Date date{};
    std::string reason;
};

struct PreprocessOutput {
    std::vector<MeanLoadProfile> profiles;       // sorted by household id
    std::vector<std::string> excluded_households;  // no valid day in the stratum
    std::vector<DayDiagnostic> degenerate_days;    // all-zero days, dropped
};

/// Full preprocessing over cleaned (complete) days: normalize, stratify and
/// average. Households without a valid day in the target stratum are
/// excluded and reported.
PreprocessOutput build_mean_profiles(const std::vector<HourlyDay>& days, Stratum target);

/// Optional export, `household_id,n_days,h0..h23` at 6 decimals.
void write_mean_profiles_csv(std::ostream& out, const std::vector<MeanLoadProfile>& profiles);

/// Reads the export format back (used by `render` to rebuild plots).
std::vector<MeanLoadProfile> read_mean_profiles_csv(std::istream& in, Stratum stratum);

}  // namespace loadshape
