// Lloyd's Kmeans over 24-hour profiles with deterministic multi-restart
// selection and the k-sweep elbow curve.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loadshape/core.hpp"

namespace loadshape {

struct KmeansParams {
    std::size_t k = 9;
    std::size_t n_restarts = 1000;
    std::uint64_t base_seed = 1;
    std::size_t max_iters = 300;
};

/// Plain Euclidean distance; throws ContractError on length mismatch.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

double squared_euclidean(const Vector24& a, const Vector24& b);

/// Index-based result of one Lloyd run; restart selection and reporting are
/// layered on top.
struct KmeansRun {
    std::vector<Vector24> centroids;
    std::vector<std::size_t> assignment;  // per input point
    double wcss = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
};

struct LloydStats {
    std::vector<double> wcss_per_iteration;
};

/// One seeded Lloyd run: Forgy initialization (k distinct points sampled
/// without replacement), assign/recenter until an iteration changes no
/// assignment or max_iters is hit. Nearest-center ties break to the lowest
/// cluster index; an empty cluster is repaired by reseeding it with the point
/// farthest from its current centroid.
KmeansRun lloyd(std::span<const Vector24> points, std::size_t k, std::uint64_t seed,
                std::size_t max_iters = 300, LloydStats* stats = nullptr);

/// Runs lloyd with seeds base_seed + 0 .. base_seed + n_restarts - 1 and
/// keeps the smallest WCSS, ties broken by the lowest seed offset. The
/// selection is order-independent, so restarts may run concurrently.
KmeansRun best_of_restarts(std::span<const Vector24> points, const KmeansParams& params);

/// Sum over points of squared Euclidean distance to the assigned centroid.
double wcss(const ClusteringResult& result, const std::vector<MeanLoadProfile>& profiles);

/// best_of_restarts wrapped into a report-facing result (households bound,
/// clusters in canonical display order, parameters echoed).
ClusteringResult kmeans_cluster(const std::vector<MeanLoadProfile>& profiles,
                                const KmeansParams& params);

struct ElbowPoint {
    std::size_t k = 0;
    double wcss = 0.0;
};

/// Best-of-restarts WCSS for each k in [k_min, k_max].
std::vector<ElbowPoint> sweep_k(const std::vector<MeanLoadProfile>& profiles, std::size_t k_min,
                                std::size_t k_max, const KmeansParams& params);

}  // namespace loadshape
