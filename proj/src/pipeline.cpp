#include "loadshape/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "loadshape/ingest.hpp"
#include "loadshape/preprocess.hpp"
#include "loadshape/report.hpp"

namespace loadshape {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Output directory handling: lockfile plus partial-output cleanup
// ---------------------------------------------------------------------------

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw InputError("cannot create output directory " + dir_.string());
        lock_path_ = dir_ / ".lock";
        lock_fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (lock_fd_ < 0) {
            throw InputError("output directory " + dir_.string() +
                             " is locked by another run (remove " + lock_path_.string() +
                             " if stale)");
        }
    }

    ~OutputDir() {
        if (lock_fd_ >= 0) {
            ::close(lock_fd_);
            ::unlink(lock_path_.c_str());
        }
    }

    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    void write_file(const std::string& relative, const std::string& content) {
        const fs::path path = dir_ / relative;
        if (path.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(path.parent_path(), ec);
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot write " + path.string());
        out << content;
        if (!out) throw InputError("failed writing " + path.string());
        written_.push_back(relative);
    }

    /// Removes everything written so far (failure path).
    void discard_partial() {
        for (const auto& rel : written_) {
            std::error_code ec;
            fs::remove(dir_ / rel, ec);
        }
        written_.clear();
    }

    const std::vector<std::string>& files() const { return written_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    fs::path lock_path_;
    int lock_fd_ = -1;
    std::vector<std::string> written_;
};

std::string json_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string metric7(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.7f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) throw InputError("unknown config key '" + where + key + "'");
    }
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    check_keys(j,
               {"input", "stratum", "method", "k", "seeds", "kmeans", "som", "two_stage",
                "mia_variant", "outdir"},
               "");
    PipelineConfig c;
    try {
        if (j.contains("input")) c.input = j.at("input").get<std::string>();
        if (j.contains("stratum")) {
            const auto s = parse_stratum(j.at("stratum").get<std::string>());
            if (!s) throw InputError("unknown stratum '" + j.at("stratum").get<std::string>() + "'");
            c.stratum = *s;
        }
        if (j.contains("method")) c.method = j.at("method").get<std::string>();
        if (j.contains("k")) c.k = j.at("k").get<std::size_t>();
        if (j.contains("seeds")) {
            const auto& seeds = j.at("seeds");
            check_keys(seeds, {"kmeans", "som"}, "seeds.");
            if (seeds.contains("kmeans")) c.seed_kmeans = seeds.at("kmeans").get<std::uint64_t>();
            if (seeds.contains("som")) c.seed_som = seeds.at("som").get<std::uint64_t>();
        }
        if (j.contains("kmeans")) {
            const auto& km = j.at("kmeans");
            check_keys(km, {"restarts", "max_iters"}, "kmeans.");
            if (km.contains("restarts")) c.kmeans_restarts = km.at("restarts").get<std::size_t>();
            if (km.contains("max_iters")) c.kmeans_max_iters = km.at("max_iters").get<std::size_t>();
        }
        if (j.contains("som")) {
            const auto& som = j.at("som");
            check_keys(som,
                       {"width", "height", "epochs", "lr_start", "lr_end", "radius_start",
                        "radius_end"},
                       "som.");
            if (som.contains("width")) c.som.width = som.at("width").get<int>();
            if (som.contains("height")) c.som.height = som.at("height").get<int>();
            if (som.contains("epochs")) c.som.epochs = som.at("epochs").get<std::size_t>();
            if (som.contains("lr_start")) c.som.lr_start = som.at("lr_start").get<double>();
            if (som.contains("lr_end")) c.som.lr_end = som.at("lr_end").get<double>();
            if (som.contains("radius_start")) c.som.radius_start = som.at("radius_start").get<double>();
            if (som.contains("radius_end")) c.som.radius_end = som.at("radius_end").get<double>();
        }
        if (j.contains("two_stage")) {
            const auto& ts = j.at("two_stage");
            check_keys(ts, {"width", "height", "weighted"}, "two_stage.");
            if (ts.contains("width")) c.two_stage_width = ts.at("width").get<int>();
            if (ts.contains("height")) c.two_stage_height = ts.at("height").get<int>();
            if (ts.contains("weighted")) c.two_stage_weighted = ts.at("weighted").get<bool>();
        }
        if (j.contains("mia_variant")) {
            const auto name = j.at("mia_variant").get<std::string>();
            const auto v = parse_mia_variant(name);
            if (!v) throw InputError("unknown mia_variant '" + name + "'");
            c.mia_variant = *v;
        }
        if (j.contains("outdir")) c.outdir = j.at("outdir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
    if (c.method != "kmeans" && c.method != "som" && c.method != "two-stage" &&
        c.method != "all") {
        throw InputError("unknown method '" + c.method + "'");
    }
    return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["input"] = c.input;
    j["stratum"] = stratum_name(c.stratum);
    j["method"] = c.method;
    j["k"] = c.k;
    j["seeds"] = {{"kmeans", c.seed_kmeans}, {"som", c.seed_som}};
    j["kmeans"] = {{"restarts", c.kmeans_restarts}, {"max_iters", c.kmeans_max_iters}};
    j["som"] = {{"width", c.som.width},
                {"height", c.som.height},
                {"epochs", c.som.epochs},
                {"lr_start", c.som.lr_start},
                {"lr_end", c.som.lr_end},
                {"radius_start", c.som.radius_start},
                {"radius_end", c.som.radius_end}};
    j["two_stage"] = {{"width", c.two_stage_width},
                      {"height", c.two_stage_height},
                      {"weighted", c.two_stage_weighted}};
    j["mia_variant"] = mia_variant_name(c.mia_variant);
    j["outdir"] = c.outdir;
    return j;
}

PipelineConfig load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

namespace {

struct Prepared {
    ParseResult parsed;
    std::size_t days_assembled = 0;
    std::size_t days_kept = 0;
    std::size_t days_dropped = 0;
    PreprocessOutput preprocess;
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(std::string("stage '") + name + "': " + e.what());
    } catch (const ContractError& e) {
        throw ContractError(std::string("stage '") + name + "': " + e.what());
    } catch (const std::exception& e) {
        throw ContractError(std::string("stage '") + name + "': " + e.what());
    }
}

Prepared prepare_profiles(const std::string& input, Stratum stratum) {
    Prepared p;
    p.parsed = stage("ingest", [&] {
        if (input.empty()) throw InputError("no input CSV given (--input or config)");
        std::ifstream in(input, std::ios::binary);
        if (!in) throw InputError("cannot open input file " + input);
        return parse_readings(in);
    });
    const auto kept = stage("clean", [&] {
        auto days = assemble_days(p.parsed.rows);
        p.days_assembled = days.size();
        auto clean = drop_incomplete_days(days);
        p.days_kept = clean.kept.size();
        p.days_dropped = p.days_assembled - p.days_kept;
        return std::move(clean.kept);
    });
    p.preprocess = stage("preprocess", [&] { return build_mean_profiles(kept, stratum); });
    return p;
}

std::string single_method_metrics_json(const PipelineConfig& c, const Prepared& p,
                                       const MethodReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"input\": \"" << json_escape(c.input) << "\",\n";
    out << "  \"stratum\": \"" << stratum_name(c.stratum) << "\",\n";
    out << "  \"mia_variant\": \"" << mia_variant_name(c.mia_variant) << "\",\n";
    out << "  \"households_clustered\": " << p.preprocess.profiles.size() << ",\n";
    out << "  \"excluded_households\": [";
    for (std::size_t i = 0; i < p.preprocess.excluded_households.size(); ++i) {
        if (i > 0) out << ", ";
        out << '"' << json_escape(p.preprocess.excluded_households[i]) << '"';
    }
    out << "],\n";
    out << "  \"days\": {\"rows_rejected\": " << p.parsed.diagnostics.size()
        << ", \"assembled\": " << p.days_assembled << ", \"kept\": " << p.days_kept
        << ", \"dropped\": " << p.days_dropped
        << ", \"degenerate\": " << p.preprocess.degenerate_days.size() << "},\n";
    out << "  \"methods\": [\n";
    out << "    {\"method\": \"" << method_name(report.method) << "\", \"k\": "
        << report.result.k << ", \"seed\": " << report.result.seed
        << ", \"mia\": " << metric7(report.mia) << ", \"wcss\": " << metric7(report.wcss)
        << ", \"sizes\": [";
    for (std::size_t i = 0; i < report.sizes.size(); ++i) {
        if (i > 0) out << ", ";
        out << report.sizes[i];
    }
    out << "]}\n  ]\n}\n";
    return out.str();
}

std::string compare_metrics_json(const PipelineConfig& c, const Prepared& p,
                                 const MethodComparison& cmp) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"input\": \"" << json_escape(c.input) << "\",\n";
    out << "  \"stratum\": \"" << stratum_name(c.stratum) << "\",\n";
    out << "  \"mia_variant\": \"" << mia_variant_name(c.mia_variant) << "\",\n";
    out << "  \"households_clustered\": " << p.preprocess.profiles.size() << ",\n";
    out << "  \"excluded_households\": [";
    for (std::size_t i = 0; i < p.preprocess.excluded_households.size(); ++i) {
        if (i > 0) out << ", ";
        out << '"' << json_escape(p.preprocess.excluded_households[i]) << '"';
    }
    out << "],\n";
    out << "  \"days\": {\"rows_rejected\": " << p.parsed.diagnostics.size()
        << ", \"assembled\": " << p.days_assembled << ", \"kept\": " << p.days_kept
        << ", \"dropped\": " << p.days_dropped
        << ", \"degenerate\": " << p.preprocess.degenerate_days.size() << "},\n";
    out << "  \"methods\": [\n";
    for (std::size_t i = 0; i < cmp.methods.size(); ++i) {
        const auto& m = cmp.methods[i];
        out << "    {\"method\": \"" << method_name(m.method) << "\", \"k\": " << m.result.k
            << ", \"seed\": " << m.result.seed << ", \"mia\": " << metric7(m.mia)
            << ", \"wcss\": " << metric7(m.wcss) << ", \"sizes\": [";
        for (std::size_t s = 0; s < m.sizes.size(); ++s) {
            if (s > 0) out << ", ";
            out << m.sizes[s];
        }
        out << "]}" << (i + 1 < cmp.methods.size() ? "," : "") << '\n';
    }
    out << "  ],\n";
    out << "  \"best_method\": \"" << method_name(cmp.methods[cmp.best_index].method) << "\"\n";
    out << "}\n";
    return out.str();
}

std::string to_string_stream(const auto& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

std::string manifest_json(const nlohmann::json& config) {
    nlohmann::json m;
    m["tool"] = "loadshape";
    m["version"] = kToolVersion;
    m["config"] = config;
    return m.dump(2) + "\n";
}

void emit_method_files(OutputDir& out, const std::string& prefix, const MethodReport& report,
                       const std::vector<MeanLoadProfile>& profiles, const SomGrid* grid) {
    out.write_file(prefix + "assignments.csv", to_string_stream([&](std::ostream& os) {
                       write_assignments_csv(os, report.result);
                   }));
    out.write_file(prefix + "centroids.csv", to_string_stream([&](std::ostream& os) {
                       write_centroids_csv(os, report.result);
                   }));
    out.write_file(prefix + "clusters.svg",
                   render_cluster_small_multiples(report.result, profiles));
    if (grid) {
        out.write_file(prefix + "codebooks.csv", to_string_stream([&](std::ostream& os) {
                           write_codebooks_csv(os, *grid);
                       }));
        out.write_file(prefix + "som_lattice.svg", render_som_lattice(*grid));
    }
}

MethodReport make_report(Method method, ClusteringResult result,
                         const std::vector<MeanLoadProfile>& profiles, MiaVariant variant) {
    MethodReport report;
    report.method = method;
    report.result = std::move(result);
    report.mia = mia(report.result, profiles, variant);
    report.wcss = wcss(report.result, profiles);
    report.sizes = report.result.cluster_sizes();
    return report;
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& config) {
    if (config.method != "kmeans" && config.method != "som" && config.method != "two-stage" &&
        config.method != "all") {
        throw InputError("unknown method '" + config.method + "'");
    }
    const Prepared prepared = prepare_profiles(config.input, config.stratum);
    const auto& profiles = prepared.preprocess.profiles;
    if (profiles.empty()) {
        throw InputError("stage 'preprocess': no household has a valid day in " +
                         stratum_name(config.stratum));
    }

    KmeansParams kmeans_params{config.k, config.kmeans_restarts, config.seed_kmeans,
                               config.kmeans_max_iters};
    SomParams som_params = config.som;
    som_params.seed = config.seed_som;
    TwoStageParams two_stage_params;
    two_stage_params.som = config.som;
    two_stage_params.som.width = config.two_stage_width;
    two_stage_params.som.height = config.two_stage_height;
    two_stage_params.som.radius_start = config.som.radius_start;  // <=0 stays auto
    two_stage_params.som.seed = config.seed_som;
    two_stage_params.kmeans = kmeans_params;
    two_stage_params.weight_by_population = config.two_stage_weighted;

    OutputDir out(config.outdir);
    RunSummary summary;
    summary.households_clustered = profiles.size();
    summary.excluded_households = prepared.preprocess.excluded_households;
    try {
        out.write_file("diagnostics.csv", to_string_stream([&](std::ostream& os) {
                           write_diagnostics_csv(os, prepared.parsed.diagnostics);
                       }));
        out.write_file("mean_profiles.csv", to_string_stream([&](std::ostream& os) {
                           write_mean_profiles_csv(os, profiles);
                       }));

        std::string metrics;
        if (config.method == "all") {
            const MethodComparison cmp = stage("cluster", [&] {
                CompareConfig cc{config.k, kmeans_params, som_params, two_stage_params,
                                 config.mia_variant};
                return compare_methods(profiles, cc);
            });
            stage("metrics", [&] {
                if (!mia_wcss_identity_check(cmp.methods[0].result, profiles)) {
                    throw ContractError("MIA/WCSS identity failed on the Kmeans result");
                }
                return 0;
            });
            emit_method_files(out, "kmeans/", cmp.methods[0], profiles, nullptr);
            emit_method_files(out, "som/", cmp.methods[1], profiles, &cmp.som_grid);
            emit_method_files(out, "two_stage/", cmp.methods[2], profiles, &cmp.two_stage_grid);
            out.write_file("comparison.csv", to_string_stream([&](std::ostream& os) {
                               write_comparison_csv(os, cmp);
                           }));
            out.write_file("comparison.json", to_string_stream([&](std::ostream& os) {
                               write_comparison_json(os, cmp);
                           }));
            metrics = compare_metrics_json(config, prepared, cmp);
        } else {
            MethodReport report;
            SomGrid grid;
            const SomGrid* grid_ptr = nullptr;
            if (config.method == "kmeans") {
                report = stage("cluster", [&] {
                    return make_report(Method::Kmeans, kmeans_cluster(profiles, kmeans_params),
                                       profiles, config.mia_variant);
                });
                stage("metrics", [&] {
                    if (!mia_wcss_identity_check(report.result, profiles)) {
                        throw ContractError("MIA/WCSS identity failed on the Kmeans result");
                    }
                    return 0;
                });
            } else if (config.method == "som") {
                report = stage("cluster", [&] {
                    return make_report(Method::Som, som_cluster(profiles, som_params, &grid),
                                       profiles, config.mia_variant);
                });
                grid_ptr = &grid;
            } else {  // two-stage
                report = stage("cluster", [&] {
                    TwoStageResult ts = two_stage_cluster(profiles, two_stage_params);
                    grid = std::move(ts.grid);
                    return make_report(Method::TwoStage, std::move(ts.result), profiles,
                                       config.mia_variant);
                });
                grid_ptr = &grid;
            }
            emit_method_files(out, "", report, profiles, grid_ptr);
            metrics = single_method_metrics_json(config, prepared, report);
        }

        out.write_file("metrics.json", metrics);
        out.write_file("manifest.json", manifest_json(config_to_json(config)));
    } catch (...) {
        out.discard_partial();
        throw;
    }
    summary.outdir = out.dir();
    summary.files = out.files();
    return summary;
}

RunSummary run_ingest(const IngestConfig& config) {
    const auto parsed = stage("ingest", [&] {
        std::ifstream in(config.input, std::ios::binary);
        if (!in) throw InputError("cannot open input file " + config.input);
        return parse_readings(in);
    });
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_household;  // total, kept
    const auto kept = stage("clean", [&] {
        const auto days = assemble_days(parsed.rows);
        for (const auto& d : days) ++per_household[d.household_id].first;
        auto clean = drop_incomplete_days(days);
        for (const auto& d : clean.kept) ++per_household[d.household_id].second;
        return std::move(clean.kept);
    });

    OutputDir out(config.outdir);
    RunSummary summary;
    try {
        out.write_file("diagnostics.csv", to_string_stream([&](std::ostream& os) {
                           write_diagnostics_csv(os, parsed.diagnostics);
                       }));
        out.write_file("cleaning_summary.csv", to_string_stream([&](std::ostream& os) {
                           os << "household_id,days_total,days_kept,days_dropped\n";
                           for (const auto& [id, counts] : per_household) {
                               os << id << ',' << counts.first << ',' << counts.second << ','
                                  << counts.first - counts.second << '\n';
                           }
                       }));
        if (config.export_profiles) {
            const auto preprocess =
                stage("preprocess", [&] { return build_mean_profiles(kept, config.stratum); });
            out.write_file("mean_profiles.csv", to_string_stream([&](std::ostream& os) {
                               write_mean_profiles_csv(os, preprocess.profiles);
                           }));
            summary.households_clustered = preprocess.profiles.size();
            summary.excluded_households = preprocess.excluded_households;
        }
    } catch (...) {
        out.discard_partial();
        throw;
    }
    summary.outdir = out.dir();
    summary.files = out.files();
    return summary;
}

RunSummary run_sweep(const SweepConfig& config) {
    const Prepared prepared = prepare_profiles(config.input, config.stratum);
    const auto& profiles = prepared.preprocess.profiles;

    const auto curve = stage("sweep", [&] {
        KmeansParams params;
        params.n_restarts = config.restarts;
        params.base_seed = config.seed;
        params.max_iters = config.max_iters;
        return sweep_k(profiles, config.k_min, config.k_max, params);
    });

    OutputDir out(config.outdir);
    RunSummary summary;
    summary.households_clustered = profiles.size();
    summary.excluded_households = prepared.preprocess.excluded_households;
    try {
        out.write_file("diagnostics.csv", to_string_stream([&](std::ostream& os) {
                           write_diagnostics_csv(os, prepared.parsed.diagnostics);
                       }));
        out.write_file("elbow.csv", to_string_stream([&](std::ostream& os) {
                           write_elbow_csv(os, curve);
                       }));
        out.write_file("elbow.svg", render_elbow_svg(curve));

        nlohmann::json j;
        j["input"] = config.input;
        j["stratum"] = stratum_name(config.stratum);
        j["k_min"] = config.k_min;
        j["k_max"] = config.k_max;
        j["kmeans"] = {{"restarts", config.restarts}, {"max_iters", config.max_iters}};
        j["seeds"] = {{"kmeans", config.seed}};
        j["outdir"] = config.outdir;
        out.write_file("manifest.json", manifest_json(j));
    } catch (...) {
        out.discard_partial();
        throw;
    }
    summary.outdir = out.dir();
    summary.files = out.files();
    return summary;
}

namespace {

std::size_t render_one_dir(const fs::path& dir, OutputDir& out, const std::string& prefix) {
    std::size_t rendered = 0;
    const auto exists = [&](const char* name) { return fs::exists(dir / name); };

    if (exists("assignments.csv") && exists("centroids.csv")) {
        // Member profiles live at the run root for compare runs.
        fs::path profiles_path = dir / "mean_profiles.csv";
        if (!fs::exists(profiles_path)) profiles_path = dir.parent_path() / "mean_profiles.csv";
        if (fs::exists(profiles_path)) {
            std::ifstream pf(profiles_path);
            std::ifstream af(dir / "assignments.csv");
            std::ifstream cf(dir / "centroids.csv");
            const auto profiles = read_mean_profiles_csv(pf, Stratum{});
            const auto result = read_result_csvs(af, cf);
            out.write_file(prefix + "clusters.svg",
                           render_cluster_small_multiples(result, profiles));
            ++rendered;
        }
    }
    if (exists("codebooks.csv")) {
        std::ifstream f(dir / "codebooks.csv");
        out.write_file(prefix + "som_lattice.svg", render_som_lattice(read_codebooks_csv(f)));
        ++rendered;
    }
    if (exists("elbow.csv")) {
        std::ifstream f(dir / "elbow.csv");
        out.write_file(prefix + "elbow.svg", render_elbow_svg(read_elbow_csv(f)));
        ++rendered;
    }
    return rendered;
}

}  // namespace

RunSummary run_render(const fs::path& run_dir) {
    if (!fs::is_directory(run_dir)) {
        throw InputError("run directory not found: " + run_dir.string());
    }
    OutputDir out(run_dir);
    RunSummary summary;
    try {
        std::size_t rendered = render_one_dir(run_dir, out, "");
        std::vector<fs::path> subdirs;
        for (const auto& entry : fs::directory_iterator(run_dir)) {
            if (entry.is_directory()) subdirs.push_back(entry.path());
        }
        std::sort(subdirs.begin(), subdirs.end());
        for (const auto& sub : subdirs) {
            rendered += render_one_dir(sub, out, sub.filename().string() + "/");
        }
        if (rendered == 0) {
            throw InputError("no renderable artifacts (assignments/centroids, codebooks or "
                             "elbow CSVs) in " +
                             run_dir.string());
        }
    } catch (...) {
        out.discard_partial();
        throw;
    }
    summary.outdir = out.dir();
    summary.files = out.files();
    return summary;
}

}  // namespace loadshape
