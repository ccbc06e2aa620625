// Seeded synthetic household datasets with ground-truth archetype labels,
// plus a brute-force Kmeans oracle for small instances.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "loadshape/core.hpp"

namespace loadshape {

/// A household usage shape: a normalized 24-hour base shape plus per-day
/// noise and a daily kWh scale interval.
struct Archetype {
    std::string name;
    Vector24 base_shape{};              // in [0,1], max exactly 1
    double day_noise_sd = 0.05;         // Gaussian, in kWh
    std::pair<double, double> scale_range{0.5, 3.0};
};

/// Nine shapes spanning the usual domestic vocabulary (breakfast peak,
/// evening peak, flat, night-heavy, ...). The noise level applies to all.
std::vector<Archetype> default_archetypes(double day_noise_sd = 0.05);

struct SynthConfig {
    std::size_t n_households = 93;
    std::pair<int, int> days_range{25, 111};  // days generated per household
    Date span_start{std::chrono::year{1988}, std::chrono::month{10}, std::chrono::day{1}};
    Date span_end{std::chrono::year{1991}, std::chrono::month{3}, std::chrono::day{31}};
    double missing_rate = 0.0;  // probability an hourly reading is emitted empty
    std::uint64_t seed = 42;
};

/// household -> archetype name, sorted by household id.
using GroundTruth = std::vector<std::pair<std::string, std::string>>;

/// Writes a readings CSV in the ingest schema and returns the ground-truth
/// labels. Byte-identical output for identical inputs and seed.
GroundTruth generate_dataset(std::ostream& csv, const std::vector<Archetype>& archetypes,
                             const SynthConfig& config);

void write_labels_csv(std::ostream& out, const GroundTruth& labels);

struct BruteForceResult {
    double wcss = 0.0;
    std::vector<std::size_t> partition;  // restricted-growth labels per point
};

/// Exhaustive optimum over all partitions into at most k non-empty clusters
/// with member-mean centroids. Guarded to n <= 12 points and k <= 3; ties
/// resolve to the lexicographically smallest partition.
BruteForceResult brute_force_kmeans(std::span<const Vector24> points, std::size_t k);

/// Relabeling-invariant agreement between two partitions of the same items;
/// 1 means identical up to relabeling, ~0 means chance level.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace loadshape
