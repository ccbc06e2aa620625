#include "loadshape/two_stage.hpp"

#include <algorithm>
#include <limits>

namespace loadshape {

TwoStageResult two_stage_cluster(const std::vector<MeanLoadProfile>& profiles,
                                 const TwoStageParams& params) {
    std::vector<Vector24> points;
    points.reserve(profiles.size());
    for (const auto& p : profiles) points.push_back(p.values);
    SomGrid grid = train_som(points, params.som);
    TwoStageResult out = two_stage_from_grid(profiles, std::move(grid), params.kmeans,
                                             params.weight_by_population);
    out.result.params["som_epochs"] = std::to_string(params.som.epochs);
    out.result.params["som_seed"] = std::to_string(params.som.seed);
    return out;
}

TwoStageResult two_stage_from_grid(const std::vector<MeanLoadProfile>& profiles, SomGrid grid,
                                   const KmeansParams& kmeans_params,
                                   bool weight_by_population) {
    const std::size_t k = kmeans_params.k;
    if (profiles.size() < k) {
        throw InputError("two-stage clustering needs at least k = " + std::to_string(k) +
                         " profiles");
    }

    std::vector<Vector24> points;
    points.reserve(profiles.size());
    for (const auto& p : profiles) points.push_back(p.values);

    const std::size_t n_nodes = grid.node_count();

    std::vector<std::size_t> bmu_of(profiles.size());
    std::vector<std::size_t> node_pop(n_nodes, 0);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        bmu_of[i] = bmu(grid, points[i]);
        ++node_pop[bmu_of[i]];
    }

    // Stage 2: Kmeans over the SOM output. Every codebook participates once;
    // the weighted variant replicates each codebook by its node population
    // (exact for integer weights) and leaves unpopulated nodes out.
    std::vector<std::size_t> node_cluster(n_nodes, 0);
    if (!weight_by_population) {
        const KmeansRun run = best_of_restarts(grid.codebooks, kmeans_params);
        node_cluster = run.assignment;
    } else {
        std::vector<Vector24> replicated;
        std::vector<std::size_t> node_of_replica;
        for (std::size_t node = 0; node < n_nodes; ++node) {
            for (std::size_t r = 0; r < node_pop[node]; ++r) {
                replicated.push_back(grid.codebooks[node]);
                node_of_replica.push_back(node);
            }
        }
        const KmeansRun run = best_of_restarts(replicated, kmeans_params);
        std::vector<bool> assigned(n_nodes, false);
        for (std::size_t r = 0; r < node_of_replica.size(); ++r) {
            if (!assigned[node_of_replica[r]]) {
                node_cluster[node_of_replica[r]] = run.assignment[r];
                assigned[node_of_replica[r]] = true;
            }
        }
        for (std::size_t node = 0; node < n_nodes; ++node) {
            if (assigned[node]) continue;
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < run.centroids.size(); ++c) {
                const double d = squared_euclidean(grid.codebooks[node], run.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            node_cluster[node] = best;
        }
    }

    ClusteringResult result;
    result.method = Method::TwoStage;
    result.k = k;
    result.seed = kmeans_params.base_seed;
    std::vector<std::size_t> sizes(k, 0);
    std::vector<Vector24> means(k);
    for (auto& m : means) m.fill(0.0);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const std::size_t cluster = node_cluster[bmu_of[i]];
        result.assignments[profiles[i].household_id] = cluster;
        ++sizes[cluster];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) means[cluster][h] += points[i][h];
    }

    // Placeholder centre for clusters no household mapped into: the mean of
    // the codebooks the stage-2 Kmeans put there.
    std::vector<Vector24> codebook_means(k);
    std::vector<std::size_t> codebook_counts(k, 0);
    for (auto& m : codebook_means) m.fill(0.0);
    for (std::size_t node = 0; node < n_nodes; ++node) {
        const std::size_t c = node_cluster[node];
        ++codebook_counts[c];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            codebook_means[c][h] += grid.codebooks[node][h];
        }
    }
    result.centroids.resize(k);
    result.empty.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        result.empty[c] = sizes[c] == 0;
        if (!result.empty[c]) {
            result.centroids[c] = means[c];
            for (auto& v : result.centroids[c]) v /= static_cast<double>(sizes[c]);
        } else if (codebook_counts[c] > 0) {
            result.centroids[c] = codebook_means[c];
            for (auto& v : result.centroids[c]) v /= static_cast<double>(codebook_counts[c]);
        } else {
            result.centroids[c].fill(0.0);
        }
    }
    result.params = {
        {"som_width", std::to_string(grid.width)},
        {"som_height", std::to_string(grid.height)},
        {"k", std::to_string(k)},
        {"restarts", std::to_string(kmeans_params.n_restarts)},
        {"base_seed", std::to_string(kmeans_params.base_seed)},
        {"weighted", weight_by_population ? "true" : "false"},
    };

    std::vector<std::size_t> new_index;
    result = canonical_display_order(std::move(result), &new_index);
    for (auto& c : node_cluster) c = new_index[c];
    return {std::move(result), std::move(grid), std::move(node_cluster)};
}

MethodComparison compare_methods(const std::vector<MeanLoadProfile>& profiles,
                                 const CompareConfig& config) {
    MethodComparison cmp;

    KmeansParams kp = config.kmeans;
    kp.k = config.k;
    MethodReport kmeans_report;
    kmeans_report.method = Method::Kmeans;
    kmeans_report.result = kmeans_cluster(profiles, kp);

    MethodReport som_report;
    som_report.method = Method::Som;
    som_report.result = som_cluster(profiles, config.som, &cmp.som_grid);

    TwoStageParams tp = config.two_stage;
    tp.kmeans.k = config.k;
    MethodReport two_stage_report;
    two_stage_report.method = Method::TwoStage;
    TwoStageResult ts = two_stage_cluster(profiles, tp);
    two_stage_report.result = std::move(ts.result);
    cmp.two_stage_grid = std::move(ts.grid);

    cmp.methods = {std::move(kmeans_report), std::move(som_report),
                   std::move(two_stage_report)};
    for (auto& m : cmp.methods) {
        m.mia = mia(m.result, profiles, config.mia_variant);
        m.wcss = wcss(m.result, profiles);
        m.sizes = m.result.cluster_sizes();
    }
    cmp.best_index = 0;
    for (std::size_t i = 1; i < cmp.methods.size(); ++i) {
        if (cmp.methods[i].mia < cmp.methods[cmp.best_index].mia) cmp.best_index = i;
    }
    return cmp;
}

}  // namespace loadshape
