#include "loadshape/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "loadshape/rng.hpp"

namespace loadshape {

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ContractError("euclidean_distance requires equal lengths");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double squared_euclidean(const Vector24& a, const Vector24& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kHoursPerDay; ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

namespace {

std::size_t nearest_center(const Vector24& point, std::span<const Vector24> centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_euclidean(point, centers[c]);
        if (d < best_d) {  // ties keep the lowest cluster index
            best_d = d;
            best = c;
        }
    }
    return best;
}

void recenter(std::span<const Vector24> points, const std::vector<std::size_t>& assignment,
              std::vector<Vector24>& centers) {
    std::vector<std::size_t> counts(centers.size(), 0);
    for (auto& c : centers) c.fill(0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t c = assignment[i];
        ++counts[c];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) centers[c][h] += points[i][h];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (counts[c] == 0) continue;  // repaired before recentering; keep stale center if not
        for (auto& v : centers[c]) v /= static_cast<double>(counts[c]);
    }
}

double total_wcss(std::span<const Vector24> points, const std::vector<std::size_t>& assignment,
                  const std::vector<Vector24>& centers) {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum += squared_euclidean(points[i], centers[assignment[i]]);
    }
    return sum;
}

/// Moves the point farthest from its centroid into each empty cluster, taking
/// donors only from clusters that keep at least one member. Returns whether
/// any assignment changed.
bool repair_empty_clusters(std::span<const Vector24> points, std::vector<std::size_t>& assignment,
                           const std::vector<Vector24>& centers,
                           std::vector<std::size_t>& counts) {
    bool changed = false;
    for (std::size_t empty_c = 0; empty_c < counts.size(); ++empty_c) {
        if (counts[empty_c] != 0) continue;
        std::size_t donor_point = points.size();
        double donor_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (counts[assignment[i]] < 2) continue;
            const double d = squared_euclidean(points[i], centers[assignment[i]]);
            if (d > donor_d) {
                donor_d = d;
                donor_point = i;
            }
        }
        if (donor_point == points.size()) {
            throw ContractError("cannot repair empty cluster: no donor cluster with 2+ members");
        }
        --counts[assignment[donor_point]];
        assignment[donor_point] = empty_c;
        counts[empty_c] = 1;
        changed = true;
    }
    return changed;
}

}  // namespace

KmeansRun lloyd(std::span<const Vector24> points, std::size_t k, std::uint64_t seed,
                std::size_t max_iters, LloydStats* stats) {
    const std::size_t n = points.size();
    if (k == 0) throw InputError("k must be at least 1");
    if (k > n) {
        throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                         " available profiles");
    }
    if (max_iters == 0) throw InputError("max_iters must be at least 1");

    Rng rng(seed);
    std::vector<Vector24> centers;
    centers.reserve(k);
    for (std::size_t idx : rng.sample_without_replacement(n, k)) centers.push_back(points[idx]);

    std::vector<std::size_t> assignment(n, k);  // k = unassigned sentinel
    std::vector<std::size_t> counts(k, 0);
    std::size_t iterations = 0;
    while (iterations < max_iters) {
        ++iterations;
        bool changed = false;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = nearest_center(points[i], centers);
            if (c != assignment[i]) changed = true;
            assignment[i] = c;
            ++counts[c];
        }
        changed |= repair_empty_clusters(points, assignment, centers, counts);
        recenter(points, assignment, centers);
        if (stats) stats->wcss_per_iteration.push_back(total_wcss(points, assignment, centers));
        if (!changed) break;
    }

    const double final_wcss = total_wcss(points, assignment, centers);
    return {std::move(centers), std::move(assignment), final_wcss, seed, iterations};
}

KmeansRun best_of_restarts(std::span<const Vector24> points, const KmeansParams& params) {
    if (params.n_restarts == 0) throw InputError("n_restarts must be at least 1");

    struct Candidate {
        KmeansRun run;
        std::uint64_t offset = 0;
        bool valid = false;
    };
    const auto run_range = [&](std::uint64_t from, std::uint64_t to) {
        Candidate best;
        for (std::uint64_t offset = from; offset < to; ++offset) {
            KmeansRun run = lloyd(points, params.k, params.base_seed + offset, params.max_iters);
            if (!best.valid || run.wcss < best.run.wcss ||
                (run.wcss == best.run.wcss && offset < best.offset)) {
                best = {std::move(run), offset, true};
            }
        }
        return best;
    };

    const std::uint64_t total = params.n_restarts;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t n_chunks = std::min<std::uint64_t>(hw, total);

    std::vector<Candidate> chunk_best;
    if (n_chunks <= 1) {
        chunk_best.push_back(run_range(0, total));
    } else {
        std::vector<std::future<Candidate>> futures;
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t from = total * c / n_chunks;
            const std::uint64_t to = total * (c + 1) / n_chunks;
            futures.push_back(
                std::async(std::launch::async, [&, from, to] { return run_range(from, to); }));
        }
        for (auto& f : futures) chunk_best.push_back(f.get());
    }

    // Order-independent selection: min by (wcss, seed offset).
    const Candidate* best = nullptr;
    for (const auto& c : chunk_best) {
        if (!c.valid) continue;
        if (!best || c.run.wcss < best->run.wcss ||
            (c.run.wcss == best->run.wcss && c.offset < best->offset)) {
            best = &c;
        }
    }
    return best->run;
}

double wcss(const ClusteringResult& result, const std::vector<MeanLoadProfile>& profiles) {
    double sum = 0.0;
    for (const auto& p : profiles) {
        const auto it = result.assignments.find(p.household_id);
        if (it == result.assignments.end() || it->second >= result.k) {
            throw ContractError("profile " + p.household_id + " has no valid cluster assignment");
        }
        sum += squared_euclidean(p.values, result.centroids[it->second]);
    }
    return sum;
}

ClusteringResult kmeans_cluster(const std::vector<MeanLoadProfile>& profiles,
                                const KmeansParams& params) {
    std::vector<Vector24> points;
    points.reserve(profiles.size());
    for (const auto& p : profiles) points.push_back(p.values);

    KmeansRun run = best_of_restarts(points, params);

    ClusteringResult result;
    result.method = Method::Kmeans;
    result.k = params.k;
    result.centroids = std::move(run.centroids);
    result.seed = run.seed;
    std::vector<std::size_t> sizes(params.k, 0);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        result.assignments[profiles[i].household_id] = run.assignment[i];
        ++sizes[run.assignment[i]];
    }
    result.empty.resize(params.k);
    for (std::size_t c = 0; c < params.k; ++c) result.empty[c] = sizes[c] == 0;
    result.params = {
        {"k", std::to_string(params.k)},
        {"restarts", std::to_string(params.n_restarts)},
        {"base_seed", std::to_string(params.base_seed)},
        {"max_iters", std::to_string(params.max_iters)},
        {"chosen_seed", std::to_string(run.seed)},
    };
    return canonical_display_order(std::move(result));
}

std::vector<ElbowPoint> sweep_k(const std::vector<MeanLoadProfile>& profiles, std::size_t k_min,
                                std::size_t k_max, const KmeansParams& params) {
    if (k_min == 0 || k_min > k_max) throw InputError("invalid k range");
    if (k_max > profiles.size()) {
        throw InputError("k_max = " + std::to_string(k_max) + " exceeds the " +
                         std::to_string(profiles.size()) + " available profiles");
    }
    std::vector<Vector24> points;
    points.reserve(profiles.size());
    for (const auto& p : profiles) points.push_back(p.values);

    std::vector<ElbowPoint> curve;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KmeansParams kp = params;
        kp.k = k;
        curve.push_back({k, best_of_restarts(points, kp).wcss});
    }
    return curve;
}

}  // namespace loadshape
