// Load-diagram distance and the Mean Index Adequacy measure used to compare
// clustering methods.
#pragma once

#include <span>
#include <vector>

#include "loadshape/core.hpp"

namespace loadshape {

/// RMS distance between two load diagrams: sqrt((1/H) * sum_h (a_h - b_h)^2).
/// Equals the Euclidean distance divided by sqrt(H).
double profile_distance(std::span<const double> a, std::span<const double> b);

enum class MiaVariant : std::uint8_t {
    Summed,          // sqrt((1/K) * sum_k sum_{r in k} d^2(r, C_k))
    PerClusterMean,  // inner sums additionally divided by cluster size
};

const char* mia_variant_name(MiaVariant v);
std::optional<MiaVariant> parse_mia_variant(std::string_view name);

/// Mean Index Adequacy over the non-empty clusters; lower means more compact
/// clusters. Every profile must be assigned. Throws ContractError when no
/// cluster has members.
double mia(const ClusteringResult& result, const std::vector<MeanLoadProfile>& profiles,
           MiaVariant variant = MiaVariant::Summed);

/// Cross-validates the two distance routes: with member-mean centroids,
/// MIA^2 * K * H must equal the within-cluster sum of squares. The WCSS side
/// is recomputed from member means, so a corrupted centroid fails the check.
bool mia_wcss_identity_check(const ClusteringResult& result,
                             const std::vector<MeanLoadProfile>& profiles);

}  // namespace loadshape
