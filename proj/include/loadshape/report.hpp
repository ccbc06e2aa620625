// Report emission: cluster small-multiple SVGs, SOM lattice SVGs, elbow
// plots, and the CSV tables the CLI writes into run directories.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "loadshape/core.hpp"
#include "loadshape/kmeans.hpp"
#include "loadshape/two_stage.hpp"

namespace loadshape {

/// One panel per cluster ("Cluster1"...), member profiles as black polylines
/// over hours 0-23, the centroid as a red polyline on top, y fixed to [0,1].
/// Nine clusters land on a 3x3 panel layout.
std::string render_cluster_small_multiples(const ClusteringResult& result,
                                           const std::vector<MeanLoadProfile>& profiles);

/// Hexagonally offset tiles (odd rows shifted by half a tile), each holding
/// its codebook polyline and a row-major label.
std::string render_som_lattice(const SomGrid& grid);

/// WCSS against k as a line plot.
std::string render_elbow_svg(const std::vector<ElbowPoint>& curve);

void write_elbow_csv(std::ostream& out, const std::vector<ElbowPoint>& curve);
std::vector<ElbowPoint> read_elbow_csv(std::istream& in);

/// `household_id,cluster` with 1-based cluster indices matching panel titles.
void write_assignments_csv(std::ostream& out, const ClusteringResult& result);

/// `cluster,size,h0..h23`, one row per cluster including empty ones.
void write_centroids_csv(std::ostream& out, const ClusteringResult& result);

/// Rebuilds a result from the two CSV exports (used by `render`).
ClusteringResult read_result_csvs(std::istream& assignments, std::istream& centroids);

/// Comparison table exports: `method,mia,wcss,sizes` (sizes ';'-joined) and
/// the JSON equivalent. Metric values carry 7 decimals.
void write_comparison_csv(std::ostream& out, const MethodComparison& cmp);
void write_comparison_json(std::ostream& out, const MethodComparison& cmp);

}  // namespace loadshape
