#include "loadshape/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "loadshape/kmeans.hpp"
#include "loadshape/rng.hpp"

namespace loadshape {

namespace {

struct Bump {
    double center;  // hour, may be fractional
    double amplitude;
    double width;
};

/// Base level plus Gaussian bumps on the circular 24-hour axis, rescaled so
/// the maximum is exactly 1.
Vector24 make_shape(double base, std::initializer_list<Bump> bumps) {
    Vector24 shape{};
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        double v = base;
        for (const auto& b : bumps) {
            double d = std::abs(static_cast<double>(h) - b.center);
            d = std::min(d, 24.0 - d);  // wrap midnight
            v += b.amplitude * std::exp(-d * d / (2.0 * b.width * b.width));
        }
        shape[h] = v;
    }
    const double max = *std::max_element(shape.begin(), shape.end());
    for (auto& v : shape) v /= max;
    return shape;
}

}  // namespace

std::vector<Archetype> default_archetypes(double day_noise_sd) {
    std::vector<Archetype> archetypes = {
        {"breakfast-peak", make_shape(0.05, {{7.0, 1.0, 1.2}, {18.5, 0.5, 2.5}}), 0, {}},
        {"evening-peak", make_shape(0.05, {{19.0, 1.0, 2.0}, {8.0, 0.15, 1.5}}), 0, {}},
        {"flat", make_shape(0.9, {{12.0, 0.1, 6.0}}), 0, {}},
        {"night-heavy", make_shape(0.08, {{2.0, 1.0, 3.0}, {17.0, 0.2, 2.0}}), 0, {}},
        {"daytime", make_shape(0.1, {{13.0, 1.0, 3.5}}), 0, {}},
        {"twin-peak", make_shape(0.05, {{8.0, 0.9, 1.5}, {19.0, 1.0, 1.8}}), 0, {}},
        {"late-evening", make_shape(0.08, {{22.0, 1.0, 1.5}}), 0, {}},
        {"morning-only", make_shape(0.02, {{9.5, 1.0, 2.8}}), 0, {}},
        {"constant-low", make_shape(0.45, {{12.5, 0.55, 0.8}}), 0, {}},
    };
    for (auto& a : archetypes) {
        a.day_noise_sd = day_noise_sd;
        a.scale_range = {0.5, 3.0};
    }
    return archetypes;
}

GroundTruth generate_dataset(std::ostream& csv, const std::vector<Archetype>& archetypes,
                             const SynthConfig& config) {
    if (archetypes.empty()) throw InputError("at least one archetype required");
    if (config.n_households == 0) throw InputError("n_households must be at least 1");
    if (config.missing_rate < 0.0 || config.missing_rate >= 1.0) {
        throw InputError("missing_rate must lie in [0, 1)");
    }
    if (config.days_range.first < 1 || config.days_range.first > config.days_range.second) {
        throw InputError("invalid days_range");
    }
    if (!config.span_start.ok() || !config.span_end.ok() ||
        config.span_start > config.span_end) {
        throw InputError("invalid date span");
    }
    for (const auto& a : archetypes) {
        const double max = *std::max_element(a.base_shape.begin(), a.base_shape.end());
        if (std::abs(max - 1.0) > 1e-12) {
            throw InputError("archetype '" + a.name + "' base shape max must be 1");
        }
        if (a.day_noise_sd < 0.0) throw InputError("day_noise_sd must be >= 0");
        if (a.scale_range.first <= 0.0 || a.scale_range.first > a.scale_range.second) {
            throw InputError("invalid scale_range for archetype '" + a.name + "'");
        }
    }

    std::vector<Date> span;
    for (std::chrono::sys_days d{config.span_start}; d <= std::chrono::sys_days{config.span_end};
         d += std::chrono::days{1}) {
        span.push_back(Date{d});
    }
    const int span_days = static_cast<int>(span.size());
    if (config.days_range.second > span_days) {
        throw InputError("days_range exceeds the " + std::to_string(span_days) +
                         "-day date span");
    }

    // Round-robin archetype assignment, then a seeded shuffle.
    std::vector<std::size_t> archetype_of(config.n_households);
    for (std::size_t i = 0; i < config.n_households; ++i) archetype_of[i] = i % archetypes.size();
    Rng assign_rng(config.seed);
    assign_rng.shuffle(archetype_of);

    const std::size_t id_width =
        std::max<std::size_t>(3, std::to_string(config.n_households).size());
    const auto household_id = [&](std::size_t i) {
        std::string num = std::to_string(i + 1);
        return "H" + std::string(id_width - std::min(id_width, num.size()), '0') + num;
    };

    csv << "household_id,date,hour,kwh\n";
    GroundTruth labels;
    char value_buf[32];
    for (std::size_t i = 0; i < config.n_households; ++i) {
        const Archetype& arch = archetypes[archetype_of[i]];
        const std::string id = household_id(i);
        labels.emplace_back(id, arch.name);

        Rng rng(derive_seed(config.seed, i));
        const int n_days = config.days_range.first +
                           static_cast<int>(rng.uniform_index(static_cast<std::size_t>(
                               config.days_range.second - config.days_range.first + 1)));

        std::vector<std::size_t> picked(span.size());
        for (std::size_t j = 0; j < picked.size(); ++j) picked[j] = j;
        for (int j = 0; j < n_days; ++j) {
            std::swap(picked[j], picked[j + rng.uniform_index(picked.size() - j)]);
        }
        picked.resize(static_cast<std::size_t>(n_days));
        std::sort(picked.begin(), picked.end());

        for (std::size_t day_idx : picked) {
            const Date date = span[day_idx];
            const double scale =
                rng.uniform_real(arch.scale_range.first, arch.scale_range.second);
            for (std::size_t h = 0; h < kHoursPerDay; ++h) {
                double kwh = arch.base_shape[h] * scale;
                if (arch.day_noise_sd > 0.0) kwh += rng.gaussian(0.0, arch.day_noise_sd);
                kwh = std::max(0.0, kwh);
                const bool missing = config.missing_rate > 0.0 &&
                                     rng.uniform_real(0.0, 1.0) < config.missing_rate;
                csv << id << ',' << format_date(date) << ',' << h << ',';
                if (!missing) {
                    std::snprintf(value_buf, sizeof(value_buf), "%.6f", kwh);
                    csv << value_buf;
                }
                csv << '\n';
            }
        }
    }
    return labels;
}

void write_labels_csv(std::ostream& out, const GroundTruth& labels) {
    out << "household_id,archetype\n";
    for (const auto& [id, name] : labels) out << id << ',' << name << '\n';
}

BruteForceResult brute_force_kmeans(std::span<const Vector24> points, std::size_t k) {
    const std::size_t n = points.size();
    if (n == 0) throw InputError("no points");
    if (n > 12 || k > 3) {
        throw InputError("brute_force_kmeans is guarded to n <= 12 and k <= 3");
    }
    if (k == 0) throw InputError("k must be at least 1");

    std::vector<std::size_t> labels(n, 0);
    BruteForceResult best;
    best.wcss = std::numeric_limits<double>::infinity();

    const auto evaluate = [&]() {
        std::size_t used = 1 + *std::max_element(labels.begin(), labels.end());
        std::vector<Vector24> centroids(used);
        std::vector<std::size_t> counts(used, 0);
        for (auto& c : centroids) c.fill(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            for (std::size_t h = 0; h < kHoursPerDay; ++h) centroids[labels[i]][h] += points[i][h];
        }
        for (std::size_t c = 0; c < used; ++c) {
            for (auto& v : centroids[c]) v /= static_cast<double>(counts[c]);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += squared_euclidean(points[i], centroids[labels[i]]);
        }
        // Strict < keeps the first (lexicographically smallest) optimum: the
        // restricted-growth strings are enumerated in lexicographic order.
        if (total < best.wcss) {
            best.wcss = total;
            best.partition = labels;
        }
    };

    // Depth-first over restricted-growth strings with at most k blocks.
    const auto enumerate = [&](auto&& self, std::size_t i, std::size_t max_used) -> void {
        if (i == n) {
            evaluate();
            return;
        }
        const std::size_t limit = std::min(max_used + 1, k - 1);
        for (std::size_t c = 0; c <= limit; ++c) {
            labels[i] = c;
            self(self, i + 1, std::max(max_used, c));
        }
    };
    labels[0] = 0;
    enumerate(enumerate, 1, 0);
    return best;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw ContractError("partitions must label the same items");
    if (a.empty()) throw ContractError("adjusted_rand_index of empty partitions");
    if (a.size() == 1) return 1.0;
    const auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> contingency;
    std::map<std::size_t, std::size_t> rows;
    std::map<std::size_t, std::size_t> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++contingency[{a[i], b[i]}];
        ++rows[a[i]];
        ++cols[b[i]];
    }
    double sum_cells = 0.0;
    for (const auto& [key, count] : contingency) sum_cells += choose2(static_cast<double>(count));
    double sum_rows = 0.0;
    for (const auto& [key, count] : rows) sum_rows += choose2(static_cast<double>(count));
    double sum_cols = 0.0;
    for (const auto& [key, count] : cols) sum_cols += choose2(static_cast<double>(count));

    const double total = choose2(static_cast<double>(a.size()));
    const double expected = sum_rows * sum_cols / total;
    const double max_index = (sum_rows + sum_cols) / 2.0;
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;  // both partitions trivial and identical in structure
    return (sum_cells - expected) / denom;
}

}  // namespace loadshape
