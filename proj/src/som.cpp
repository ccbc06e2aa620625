#include "loadshape/som.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "loadshape/kmeans.hpp"
#include "loadshape/rng.hpp"

namespace loadshape {

std::size_t bmu(const SomGrid& grid, const Vector24& profile) {
    if (grid.codebooks.empty()) throw ContractError("bmu on an empty grid");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.codebooks.size(); ++j) {
        const double d = squared_euclidean(profile, grid.codebooks[j]);
        if (d < best_d) {  // ties keep the lowest row-major index
            best_d = d;
            best = j;
        }
    }
    return best;
}

void som_update(SomGrid& grid, const Vector24& sample, std::size_t winner, double lr,
                double sigma) {
    const NodeCoord w_coord = grid.coord_of(winner);
    const double two_sigma_sq = 2.0 * sigma * sigma;
    for (std::size_t j = 0; j < grid.node_count(); ++j) {
        const double d = grid.node_distance(w_coord, grid.coord_of(j));
        const double factor = lr * std::exp(-d * d / two_sigma_sq);
        auto& w = grid.codebooks[j];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            w[h] += factor * (sample[h] - w[h]);
        }
    }
}

namespace {

double resolve_radius_start(const SomParams& p) {
    if (p.radius_start > 0.0) return p.radius_start;
    return std::max(std::max(p.width, p.height) / 2.0, p.radius_end);
}

void validate(const SomParams& p, std::size_t n_profiles) {
    if (p.width < 1 || p.height < 1) throw InputError("SOM grid dimensions must be >= 1");
    if (n_profiles == 0) throw InputError("SOM training requires at least one profile");
    if (!(p.lr_start > p.lr_end) || !(p.lr_end > 0.0)) {
        throw InputError("learning rate must satisfy lr_start > lr_end > 0");
    }
    if (!(resolve_radius_start(p) >= p.radius_end) || !(p.radius_end > 0.0)) {
        throw InputError("radius must satisfy radius_start >= radius_end > 0");
    }
}

}  // namespace

SomGrid train_som(std::span<const Vector24> profiles, const SomParams& params) {
    validate(params, profiles.size());
    const std::size_t n_nodes =
        static_cast<std::size_t>(params.width) * static_cast<std::size_t>(params.height);
    const double radius_start = resolve_radius_start(params);

    SomGrid grid;
    grid.width = params.width;
    grid.height = params.height;
    grid.codebooks.resize(n_nodes);

    Rng rng(params.seed);
    for (auto& codebook : grid.codebooks) {
        codebook = profiles[rng.uniform_index(profiles.size())];  // with replacement
    }

    const std::size_t total = params.epochs * profiles.size();
    const double denom = total > 1 ? static_cast<double>(total - 1) : 1.0;
    std::vector<std::size_t> order(profiles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const double frac = static_cast<double>(t) / denom;
            const double lr = params.lr_start + (params.lr_end - params.lr_start) * frac;
            const double radius = radius_start + (params.radius_end - radius_start) * frac;
            const Vector24& x = profiles[i];
            som_update(grid, x, bmu(grid, x), lr, radius);
            ++t;
        }
    }
    return grid;
}

ClusteringResult som_cluster(const std::vector<MeanLoadProfile>& profiles,
                             const SomParams& params, SomGrid* grid_out) {
    std::vector<Vector24> points;
    points.reserve(profiles.size());
    for (const auto& p : profiles) points.push_back(p.values);

    const SomGrid grid = train_som(points, params);
    if (grid_out) *grid_out = grid;
    const std::size_t k = grid.node_count();

    ClusteringResult result;
    result.method = Method::Som;
    result.k = k;
    result.seed = params.seed;
    std::vector<std::size_t> sizes(k, 0);
    std::vector<Vector24> means(k);
    for (auto& m : means) m.fill(0.0);
    for (const auto& p : profiles) {
        const std::size_t node = bmu(grid, p.values);
        result.assignments[p.household_id] = node;
        ++sizes[node];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) means[node][h] += p.values[h];
    }
    result.centroids.resize(k);
    result.empty.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        result.empty[c] = sizes[c] == 0;
        // Empty nodes keep their codebook as a placeholder centre.
        result.centroids[c] = result.empty[c] ? grid.codebooks[c] : means[c];
        if (!result.empty[c]) {
            for (auto& v : result.centroids[c]) v /= static_cast<double>(sizes[c]);
        }
    }
    result.params = {
        {"width", std::to_string(params.width)},
        {"height", std::to_string(params.height)},
        {"epochs", std::to_string(params.epochs)},
        {"lr_start", std::to_string(params.lr_start)},
        {"lr_end", std::to_string(params.lr_end)},
        {"radius_start", std::to_string(resolve_radius_start(params))},
        {"radius_end", std::to_string(params.radius_end)},
        {"seed", std::to_string(params.seed)},
    };
    return canonical_display_order(std::move(result));
}

void write_codebooks_csv(std::ostream& out, const SomGrid& grid) {
    out << "node_row,node_col";
    for (std::size_t h = 0; h < kHoursPerDay; ++h) out << ",h" << h;
    out << '\n';
    char buf[32];
    for (std::size_t j = 0; j < grid.node_count(); ++j) {
        const NodeCoord c = grid.coord_of(j);
        out << c.row << ',' << c.col;
        for (double v : grid.codebooks[j]) {
            std::snprintf(buf, sizeof(buf), "%.6f", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

SomGrid read_codebooks_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty codebook CSV");
    struct Entry {
        NodeCoord coord;
        Vector24 values;
    };
    std::vector<Entry> entries;
    int max_row = -1;
    int max_col = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Entry e;
        std::size_t start = 0;
        std::size_t field = 0;
        while (start <= line.size() && field < kHoursPerDay + 2) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view f(line.data() + start, comma - start);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw InputError("malformed codebook CSV row: " + line);
            }
            if (field == 0) {
                e.coord.row = static_cast<int>(v);
            } else if (field == 1) {
                e.coord.col = static_cast<int>(v);
            } else {
                e.values[field - 2] = v;
            }
            ++field;
            start = comma + 1;
        }
        if (field != kHoursPerDay + 2) throw InputError("malformed codebook CSV row: " + line);
        max_row = std::max(max_row, e.coord.row);
        max_col = std::max(max_col, e.coord.col);
        entries.push_back(e);
    }
    if (entries.empty()) throw InputError("codebook CSV has no nodes");
    SomGrid grid;
    grid.width = max_col + 1;
    grid.height = max_row + 1;
    if (entries.size() != static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height)) {
        throw InputError("codebook CSV does not cover a full grid");
    }
    grid.codebooks.resize(entries.size());
    for (const auto& e : entries) grid.codebooks[grid.index_of(e.coord)] = e.values;
    return grid;
}

}  // namespace loadshape
