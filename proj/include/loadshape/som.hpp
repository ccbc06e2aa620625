// Kohonen self-organising map training over the hexagonal grid, and direct
// SOM clustering where each node is a cluster.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "loadshape/core.hpp"

namespace loadshape {

struct SomParams {
    int width = 3;
    int height = 3;
    std::size_t epochs = 500;
    double lr_start = 0.5;
    double lr_end = 0.01;
    double radius_start = 0.0;  // <= 0 resolves to max(width, height) / 2
    double radius_end = 1.0;
    std::uint64_t seed = 1;
};

/// Best matching unit: the node whose codebook is nearest (Euclidean) to the
/// profile. Ties break to the lowest row-major node index.
std::size_t bmu(const SomGrid& grid, const Vector24& profile);

/// One presentation step: every codebook w moves by
/// lr * exp(-d_hex^2 / (2 sigma^2)) * (sample - w), with d_hex measured from
/// the winning node.
void som_update(SomGrid& grid, const Vector24& sample, std::size_t winner, double lr,
                double sigma);

/// Sequential Kohonen training: codebooks start as seeded samples of the
/// input, every epoch presents all profiles in a seeded shuffled order, and
/// each presentation nudges every codebook toward the sample under a
/// Gaussian neighborhood over hexagonal node distance. Learning rate and
/// radius decay linearly across all presentations.
SomGrid train_som(std::span<const Vector24> profiles, const SomParams& params);

/// Direct clustering: households map to their BMU node; reported centroids
/// are member means, and nodes without members become empty clusters. The
/// trained grid can be captured through grid_out for lattice rendering.
ClusteringResult som_cluster(const std::vector<MeanLoadProfile>& profiles,
                             const SomParams& params, SomGrid* grid_out = nullptr);

/// Codebook export, `node_row,node_col,h0..h23` at 6 decimals.
void write_codebooks_csv(std::ostream& out, const SomGrid& grid);

/// Reads the export format back (used by `render`).
SomGrid read_codebooks_csv(std::istream& in);

}  // namespace loadshape
