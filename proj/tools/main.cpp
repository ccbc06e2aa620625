// loadshape CLI: synthetic data generation, ingestion, clustering, the elbow
// sweep, method comparison and SVG re-rendering.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "loadshape/pipeline.hpp"
#include "loadshape/synth.hpp"

namespace {

using namespace loadshape;

struct SynthOptions {
    std::string out;
    std::string labels;
    std::size_t households = 93;
    std::size_t archetypes = 9;
    double noise_sd = 0.05;
    double missing_rate = 0.0;
    int days_min = 25;
    int days_max = 111;
    std::string span_start = "1988-10-01";
    std::string span_end = "1991-03-31";
    std::uint64_t seed = 42;
};

int cmd_synth(const SynthOptions& opt) {
    auto library = default_archetypes(opt.noise_sd);
    if (opt.archetypes == 0 || opt.archetypes > library.size()) {
        throw InputError("--archetypes must be between 1 and " +
                         std::to_string(library.size()));
    }
    library.resize(opt.archetypes);

    SynthConfig config;
    config.n_households = opt.households;
    config.days_range = {opt.days_min, opt.days_max};
    config.missing_rate = opt.missing_rate;
    config.seed = opt.seed;
    const auto start = parse_date(opt.span_start);
    const auto end = parse_date(opt.span_end);
    if (!start || !end) throw InputError("invalid --span-start/--span-end date");
    config.span_start = *start;
    config.span_end = *end;

    std::ofstream csv(opt.out, std::ios::binary);
    if (!csv) throw InputError("cannot write " + opt.out);
    const GroundTruth labels = generate_dataset(csv, library, config);
    csv.close();
    std::cout << "wrote " << opt.out << " (" << opt.households << " households, "
              << opt.archetypes << " archetypes, seed " << opt.seed << ")\n";

    if (!opt.labels.empty()) {
        std::ofstream lf(opt.labels, std::ios::binary);
        if (!lf) throw InputError("cannot write " + opt.labels);
        write_labels_csv(lf, labels);
        std::cout << "wrote " << opt.labels << "\n";
    }
    return 0;
}

void print_summary(const RunSummary& summary) {
    for (const auto& f : summary.files) {
        std::cout << "wrote " << (summary.outdir / f).string() << "\n";
    }
}

/// Shared cluster/compare option wiring: config file plus dotted overrides.
struct ClusterOptions {
    std::string config_file;
    PipelineConfig config;

    std::string stratum_name_opt;
    std::string mia_variant_opt;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--config", config_file, "JSON config file");
        cmd.add_option("--input", config.input, "readings CSV");
        cmd.add_option("--stratum", stratum_name_opt,
                       "winter-weekend | winter-weekday | summer-weekend | summer-weekday");
        cmd.add_option("--k", config.k, "number of clusters");
        cmd.add_option("--outdir", config.outdir, "output directory");
        cmd.add_option("--seeds.kmeans", config.seed_kmeans, "Kmeans restart base seed");
        cmd.add_option("--seeds.som", config.seed_som, "SOM training seed");
        cmd.add_option("--kmeans.restarts", config.kmeans_restarts, "Kmeans restarts");
        cmd.add_option("--kmeans.max_iters", config.kmeans_max_iters, "Lloyd iteration cap");
        cmd.add_option("--som.width", config.som.width, "SOM grid width");
        cmd.add_option("--som.height", config.som.height, "SOM grid height");
        cmd.add_option("--som.epochs", config.som.epochs, "SOM training epochs");
        cmd.add_option("--som.lr_start", config.som.lr_start, "initial learning rate");
        cmd.add_option("--som.lr_end", config.som.lr_end, "final learning rate");
        cmd.add_option("--som.radius_start", config.som.radius_start,
                       "initial neighborhood radius (<= 0 = auto)");
        cmd.add_option("--som.radius_end", config.som.radius_end, "final neighborhood radius");
        cmd.add_option("--two_stage.width", config.two_stage_width, "intermediate SOM width");
        cmd.add_option("--two_stage.height", config.two_stage_height, "intermediate SOM height");
        cmd.add_flag("--two_stage.weighted", config.two_stage_weighted,
                     "weight codebooks by node population in stage 2");
        cmd.add_option("--mia_variant", mia_variant_opt, "summed | per-cluster-mean");
    }

    /// Resolution order: defaults < config file < explicit CLI flags.
    PipelineConfig resolve(const CLI::App& cmd) {
        PipelineConfig resolved;
        if (!config_file.empty()) resolved = load_config_file(config_file);

        const auto take = [&](const char* flag, auto member) {
            if (cmd.count(flag) > 0) resolved.*member = config.*member;
        };
        take("--input", &PipelineConfig::input);
        take("--k", &PipelineConfig::k);
        take("--outdir", &PipelineConfig::outdir);
        take("--seeds.kmeans", &PipelineConfig::seed_kmeans);
        take("--seeds.som", &PipelineConfig::seed_som);
        take("--kmeans.restarts", &PipelineConfig::kmeans_restarts);
        take("--kmeans.max_iters", &PipelineConfig::kmeans_max_iters);
        take("--two_stage.width", &PipelineConfig::two_stage_width);
        take("--two_stage.height", &PipelineConfig::two_stage_height);
        take("--two_stage.weighted", &PipelineConfig::two_stage_weighted);
        if (cmd.count("--som.width")) resolved.som.width = config.som.width;
        if (cmd.count("--som.height")) resolved.som.height = config.som.height;
        if (cmd.count("--som.epochs")) resolved.som.epochs = config.som.epochs;
        if (cmd.count("--som.lr_start")) resolved.som.lr_start = config.som.lr_start;
        if (cmd.count("--som.lr_end")) resolved.som.lr_end = config.som.lr_end;
        if (cmd.count("--som.radius_start")) resolved.som.radius_start = config.som.radius_start;
        if (cmd.count("--som.radius_end")) resolved.som.radius_end = config.som.radius_end;
        if (cmd.count("--stratum")) {
            const auto s = parse_stratum(stratum_name_opt);
            if (!s) throw InputError("unknown stratum '" + stratum_name_opt + "'");
            resolved.stratum = *s;
        }
        if (cmd.count("--mia_variant")) {
            const auto v = parse_mia_variant(mia_variant_opt);
            if (!v) throw InputError("unknown mia_variant '" + mia_variant_opt + "'");
            resolved.mia_variant = *v;
        }
        return resolved;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loadshape: clustering of domestic electricity load profiles"};
    app.require_subcommand(1);

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand("synth", "generate a synthetic readings CSV");
    synth->add_option("--out", synth_opt.out, "output readings CSV")->required();
    synth->add_option("--labels", synth_opt.labels, "ground-truth labels CSV");
    synth->add_option("--households", synth_opt.households, "number of households");
    synth->add_option("--archetypes", synth_opt.archetypes, "archetypes used (1-9)");
    synth->add_option("--noise-sd", synth_opt.noise_sd, "per-hour Gaussian noise (kWh)");
    synth->add_option("--missing-rate", synth_opt.missing_rate, "probability of a missing hour");
    synth->add_option("--days-min", synth_opt.days_min, "minimum days per household");
    synth->add_option("--days-max", synth_opt.days_max, "maximum days per household");
    synth->add_option("--span-start", synth_opt.span_start, "first date of the span");
    synth->add_option("--span-end", synth_opt.span_end, "last date of the span");
    synth->add_option("--seed", synth_opt.seed, "generator seed");

    IngestConfig ingest_config;
    std::string ingest_stratum = "winter-weekend";
    auto* ingest = app.add_subcommand("ingest", "parse and clean a readings CSV");
    ingest->add_option("--input", ingest_config.input, "readings CSV")->required();
    ingest->add_option("--outdir", ingest_config.outdir, "output directory")->required();
    ingest->add_option("--stratum", ingest_stratum, "stratum for --export-profiles");
    ingest->add_flag("--export-profiles", ingest_config.export_profiles,
                     "also write mean_profiles.csv");

    ClusterOptions cluster_opt;
    auto* cluster = app.add_subcommand("cluster", "run one clustering method end to end");
    std::string cluster_method = "kmeans";
    cluster->add_option("--method", cluster_method, "kmeans | som | two-stage | all");
    cluster_opt.add_to(*cluster);

    ClusterOptions compare_opt;
    auto* compare = app.add_subcommand("compare", "run all three methods and compare by MIA");
    compare_opt.add_to(*compare);

    SweepConfig sweep_config;
    std::string sweep_stratum = "winter-weekend";
    auto* sweep = app.add_subcommand("sweep-k", "WCSS elbow curve over a range of k");
    sweep->add_option("--input", sweep_config.input, "readings CSV")->required();
    sweep->add_option("--outdir", sweep_config.outdir, "output directory")->required();
    sweep->add_option("--stratum", sweep_stratum, "stratum to cluster");
    sweep->add_option("--k-min", sweep_config.k_min, "smallest k");
    sweep->add_option("--k-max", sweep_config.k_max, "largest k");
    sweep->add_option("--kmeans.restarts", sweep_config.restarts, "restarts per k");
    sweep->add_option("--kmeans.max_iters", sweep_config.max_iters, "Lloyd iteration cap");
    sweep->add_option("--seeds.kmeans", sweep_config.seed, "restart base seed");

    std::string render_dir;
    auto* render = app.add_subcommand("render", "regenerate SVGs from a run directory");
    render->add_option("--run", render_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_opt);
        if (ingest->parsed()) {
            const auto s = loadshape::parse_stratum(ingest_stratum);
            if (!s) throw loadshape::InputError("unknown stratum '" + ingest_stratum + "'");
            ingest_config.stratum = *s;
            print_summary(run_ingest(ingest_config));
            return 0;
        }
        if (cluster->parsed()) {
            auto config = cluster_opt.resolve(*cluster);
            if (cluster->count("--method")) config.method = cluster_method;
            print_summary(run_pipeline(config));
            return 0;
        }
        if (compare->parsed()) {
            auto config = compare_opt.resolve(*compare);
            config.method = "all";
            print_summary(run_pipeline(config));
            return 0;
        }
        if (sweep->parsed()) {
            const auto s = loadshape::parse_stratum(sweep_stratum);
            if (!s) throw loadshape::InputError("unknown stratum '" + sweep_stratum + "'");
            sweep_config.stratum = *s;
            print_summary(run_sweep(sweep_config));
            return 0;
        }
        if (render->parsed()) {
            print_summary(run_render(render_dir));
            return 0;
        }
    } catch (const loadshape::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const loadshape::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
