// Core domain types for domestic load-profile clustering: hourly household
// days, strata, normalized profiles, clustering results and SOM grids.
#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace loadshape {

inline constexpr std::size_t kHoursPerDay = 24;

/// A day's readings (or any profile) as a fixed 24-slot vector.
using Vector24 = std::array<double, kHoursPerDay>;

/// Bad user input: unreadable files, malformed formats, invalid parameters.
/// Surfaces as exit code 2 in the CLI.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated numerical contract or internal invariant. Exit code 3 in the CLI.
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Calendar
// ---------------------------------------------------------------------------

using Date = std::chrono::year_month_day;

/// Parses "YYYY-MM-DD". Returns nullopt for anything that is not a valid
/// Gregorian date.
std::optional<Date> parse_date(std::string_view iso);

/// Formats as "YYYY-MM-DD".
std::string format_date(const Date& d);

std::chrono::weekday weekday_of(const Date& d);

// ---------------------------------------------------------------------------
// Strata
// ---------------------------------------------------------------------------

enum class Season : std::uint8_t { Winter, Summer };
enum class DayType : std::uint8_t { Weekday, Weekend };

struct Stratum {
    Season season = Season::Winter;
    DayType day_type = DayType::Weekend;

    auto operator<=>(const Stratum&) const = default;
};

/// "winter-weekend", "summer-weekday", ...
std::string stratum_name(const Stratum& s);
std::optional<Stratum> parse_stratum(std::string_view name);

// ---------------------------------------------------------------------------
// Readings and profiles
// ---------------------------------------------------------------------------

/// One household-day of hourly kWh readings. A disengaged slot is a missing
/// reading; present readings are finite and >= 0.
struct HourlyDay {
    std::string household_id;
    Date date{};
    std::array<std::optional<double>, kHoursPerDay> readings{};

    bool complete() const;
    std::size_t missing_count() const;
};

/// A peak-normalized daily shape: 24 values in [0, 1], max exactly 1 when
/// produced by normalize_day.
struct LoadProfile {
    Vector24 values{};
};

/// Per-household, per-stratum hour-wise mean of normalized days.
struct MeanLoadProfile {
    std::string household_id;
    Stratum stratum;
    Vector24 values{};
    std::size_t n_days = 0;
};

// ---------------------------------------------------------------------------
// Clustering results
// ---------------------------------------------------------------------------

enum class Method : std::uint8_t { Kmeans, Som, TwoStage };

std::string method_name(Method m);

struct ClusteringResult {
    Method method = Method::Kmeans;
    std::size_t k = 0;
    std::vector<Vector24> centroids;           // one per cluster, index < k
    std::vector<bool> empty;                   // flags clusters with no members
    std::map<std::string, std::size_t> assignments;  // household -> cluster
    std::uint64_t seed = 0;
    std::map<std::string, std::string> params;       // provenance echo

    std::vector<std::size_t> cluster_sizes() const;
};

/// Reorders clusters by descending size, then lexicographic centroid, and
/// remaps assignments accordingly. Report-facing results use this order.
/// When given, new_index_of_old receives the old-index -> new-index map.
ClusteringResult canonical_display_order(ClusteringResult r,
                                         std::vector<std::size_t>* new_index_of_old = nullptr);

// ---------------------------------------------------------------------------
// SOM grid
// ---------------------------------------------------------------------------

struct NodeCoord {
    int col = 0;
    int row = 0;

    auto operator<=>(const NodeCoord&) const = default;
};

/// Hexagonal lattice geometry: odd rows are offset by half a column and rows
/// are spaced sqrt(3)/2 apart, so all six neighbors of an interior node sit
/// at distance 1.
double hex_x(NodeCoord c);
double hex_y(NodeCoord c);

/// Euclidean distance between two node centers in the hexagonal layout.
/// Throws std::out_of_range if a coordinate lies outside the width x height
/// grid.
double hex_node_distance(NodeCoord a, NodeCoord b, int width, int height);

/// Hexagonal lattice of codebook vectors, stored row-major.
struct SomGrid {
    int width = 0;
    int height = 0;
    std::vector<Vector24> codebooks;

    std::size_t node_count() const { return codebooks.size(); }
    std::size_t index_of(NodeCoord c) const;
    NodeCoord coord_of(std::size_t index) const;
    double node_distance(NodeCoord a, NodeCoord b) const;
};

}  // namespace loadshape
