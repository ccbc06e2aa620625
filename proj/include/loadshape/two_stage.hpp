// The two-stage pipeline: a 10x7 intermediate SOM, Kmeans over its codebooks,
// household pass-through mapping, and the three-method comparison.
#pragma once

#include <vector>

#include "loadshape/kmeans.hpp"
#include "loadshape/metrics.hpp"
#include "loadshape/som.hpp"

namespace loadshape {

struct TwoStageParams {
    SomParams som = SomParams{.width = 10, .height = 7};
    KmeansParams kmeans;  // kmeans.k = final cluster count
    // Off by default: each codebook counts once in stage-2 Kmeans. When on,
    // codebooks are weighted by the number of households mapped to the node.
    bool weight_by_population = false;
};

struct TwoStageResult {
    ClusteringResult result;
    SomGrid grid;                            // trained intermediate map
    std::vector<std::size_t> node_cluster;   // node index -> final cluster
};

/// Trains the intermediate SOM on household profiles, clusters its codebooks
/// with best-of-restarts Kmeans, and maps each household through its BMU node
/// to a final cluster. Reported centroids are household member means.
TwoStageResult two_stage_cluster(const std::vector<MeanLoadProfile>& profiles,
                                 const TwoStageParams& params);

/// Stage 2 alone, over an already-trained grid.
TwoStageResult two_stage_from_grid(const std::vector<MeanLoadProfile>& profiles, SomGrid grid,
                                   const KmeansParams& kmeans_params,
                                   bool weight_by_population = false);

struct MethodReport {
    Method method = Method::Kmeans;
    ClusteringResult result;
    double mia = 0.0;
    double wcss = 0.0;
    std::vector<std::size_t> sizes;
};

struct MethodComparison {
    std::vector<MethodReport> methods;  // kmeans, som, two-stage
    std::size_t best_index = 0;         // minimum MIA
    SomGrid som_grid;                   // direct SOM lattice
    SomGrid two_stage_grid;             // intermediate 10x7 lattice
};

struct CompareConfig {
    std::size_t k = 9;
    KmeansParams kmeans;
    SomParams som;  // direct SOM grid (3x3 by default)
    TwoStageParams two_stage;
    MiaVariant mia_variant = MiaVariant::Summed;
};

/// Runs all three methods over the same profiles and reports MIA, WCSS and
/// cluster sizes per method, flagging the minimum-MIA method.
MethodComparison compare_methods(const std::vector<MeanLoadProfile>& profiles,
                                 const CompareConfig& config);

}  // namespace loadshape
