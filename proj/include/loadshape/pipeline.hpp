// Run orchestration for the CLI: configuration, the ingest-to-report
// pipeline, the k sweep, and re-rendering of stored runs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "loadshape/two_stage.hpp"

#include <json.hpp>

namespace loadshape {

inline constexpr const char* kToolVersion = "0.1.0";

/// Mirrors the config JSON. Every key has a CLI flag of the same dotted name.
struct PipelineConfig {
    std::string input;
    Stratum stratum{Season::Winter, DayType::Weekend};
    std::string method = "kmeans";  // kmeans | som | two-stage | all
    std::size_t k = 9;

    std::uint64_t seed_kmeans = 1;  // seeds.kmeans: restart base seed
    std::uint64_t seed_som = 1;     // seeds.som

    std::size_t kmeans_restarts = 1000;  // kmeans.restarts
    std::size_t kmeans_max_iters = 300;  // kmeans.max_iters

    SomParams som;  // som.*; the seed field is overridden by seeds.som

    int two_stage_width = 10;         // two_stage.width
    int two_stage_height = 7;         // two_stage.height
    bool two_stage_weighted = false;  // two_stage.weighted

    MiaVariant mia_variant = MiaVariant::Summed;
    std::string outdir = "out";
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig load_config_file(const std::filesystem::path& path);

struct RunSummary {
    std::filesystem::path outdir;
    std::vector<std::string> files;  // paths written, relative to outdir
    std::size_t households_clustered = 0;
    std::vector<std::string> excluded_households;
};

/// Ingest -> clean -> normalize -> stratify -> mean profiles -> cluster ->
/// metrics -> reports. Writes a manifest recording every parameter and seed;
/// a failing stage removes partial outputs and rethrows naming the stage.
RunSummary run_pipeline(const PipelineConfig& config);

struct IngestConfig {
    std::string input;
    Stratum stratum{Season::Winter, DayType::Weekend};
    bool export_profiles = false;
    std::string outdir = "out";
};

/// Parse + clean only: writes the diagnostics sidecar and a per-household
/// cleaning summary, plus the mean-profile export when requested.
RunSummary run_ingest(const IngestConfig& config);

struct SweepConfig {
    std::string input;
    Stratum stratum{Season::Winter, DayType::Weekend};
    std::size_t k_min = 2;
    std::size_t k_max = 15;
    std::size_t restarts = 1000;
    std::size_t max_iters = 300;
    std::uint64_t seed = 1;
    std::string outdir = "out";
};

/// Elbow sweep: writes elbow.csv, elbow.svg and a manifest.
RunSummary run_sweep(const SweepConfig& config);

/// Regenerates SVGs from the CSV artifacts of an existing run directory
/// (including per-method subdirectories of a compare run).
RunSummary run_render(const std::filesystem::path& run_dir);

}  // namespace loadshape
