#include "loadshape/metrics.hpp"

#include <cmath>

#include "loadshape/kmeans.hpp"

namespace loadshape {

double profile_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw ContractError("profile_distance requires equal, non-zero lengths");
    }
    double sum = 0.0;
    for (std::size_t h = 0; h < a.size(); ++h) {
        const double diff = a[h] - b[h];
        sum += diff * diff;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

const char* mia_variant_name(MiaVariant v) {
    return v == MiaVariant::Summed ? "summed" : "per-cluster-mean";
}

std::optional<MiaVariant> parse_mia_variant(std::string_view name) {
    if (name == "summed") return MiaVariant::Summed;
    if (name == "per-cluster-mean") return MiaVariant::PerClusterMean;
    return std::nullopt;
}

namespace {

std::vector<std::vector<const MeanLoadProfile*>> members_by_cluster(
    const ClusteringResult& result, const std::vector<MeanLoadProfile>& profiles) {
    std::vector<std::vector<const MeanLoadProfile*>> members(result.k);
    for (const auto& p : profiles) {
        const auto it = result.assignments.find(p.household_id);
        if (it == result.assignments.end()) {
            throw ContractError("profile " + p.household_id + " has no cluster assignment");
        }
        if (it->second >= result.k) {
            throw ContractError("assignment index out of range for " + p.household_id);
        }
        members[it->second].push_back(&p);
    }
    return members;
}

}  // namespace

double mia(const ClusteringResult& result, const std::vector<MeanLoadProfile>& profiles,
           MiaVariant variant) {
    const auto members = members_by_cluster(result, profiles);
    double total = 0.0;
    std::size_t non_empty = 0;
    for (std::size_t c = 0; c < result.k; ++c) {
        if (members[c].empty()) continue;
        ++non_empty;
        double cluster_sum = 0.0;
        for (const auto* p : members[c]) {
            const double d = profile_distance(p->values, result.centroids[c]);
            cluster_sum += d * d;
        }
        if (variant == MiaVariant::PerClusterMean) {
            cluster_sum /= static_cast<double>(members[c].size());
        }
        total += cluster_sum;
    }
    if (non_empty == 0) throw ContractError("MIA undefined: no cluster has members");
    return std::sqrt(total / static_cast<double>(non_empty));
}

bool mia_wcss_identity_check(const ClusteringResult& result,
                             const std::vector<MeanLoadProfile>& profiles) {
    const auto members = members_by_cluster(result, profiles);

    // WCSS route: plain Euclidean distances to recomputed member means.
    double wcss_means = 0.0;
    std::size_t non_empty = 0;
    for (std::size_t c = 0; c < result.k; ++c) {
        if (members[c].empty()) continue;
        ++non_empty;
        Vector24 mean{};
        for (const auto* p : members[c]) {
            for (std::size_t h = 0; h < kHoursPerDay; ++h) mean[h] += p->values[h];
        }
        for (auto& v : mean) v /= static_cast<double>(members[c].size());
        for (const auto* p : members[c]) wcss_means += squared_euclidean(p->values, mean);
    }
    if (non_empty == 0) throw ContractError("identity check undefined: no cluster has members");

    // MIA route: load-diagram distances to the result's stored centroids.
    const double m = mia(result, profiles, MiaVariant::Summed);
    const double lhs = m * m * static_cast<double>(non_empty) * static_cast<double>(kHoursPerDay);
    return std::abs(lhs - wcss_means) <= 1e-9 * std::max(1.0, wcss_means);
}

}  // namespace loadshape
