#include "loadshape/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace loadshape {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

std::optional<Date> parse_date(std::string_view iso) {
    // YYYY-MM-DD, fixed field widths.
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
        !parse_int(iso.substr(8, 2), d)) {
        return std::nullopt;
    }
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::chrono::weekday weekday_of(const Date& d) {
    return std::chrono::weekday{std::chrono::sys_days{d}};
}

std::string stratum_name(const Stratum& s) {
    std::string name = s.season == Season::Winter ? "winter" : "summer";
    name += s.day_type == DayType::Weekend ? "-weekend" : "-weekday";
    return name;
}

std::optional<Stratum> parse_stratum(std::string_view name) {
    for (Season season : {Season::Winter, Season::Summer}) {
        for (DayType day_type : {DayType::Weekday, DayType::Weekend}) {
            const Stratum s{season, day_type};
            if (stratum_name(s) == name) return s;
        }
    }
    return std::nullopt;
}

bool HourlyDay::complete() const {
    return std::all_of(readings.begin(), readings.end(),
                       [](const auto& r) { return r.has_value(); });
}

std::size_t HourlyDay::missing_count() const {
    return static_cast<std::size_t>(std::count_if(
        readings.begin(), readings.end(), [](const auto& r) { return !r.has_value(); }));
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Kmeans: return "kmeans";
        case Method::Som: return "som";
        case Method::TwoStage: return "two-stage";
    }
    return "unknown";
}

std::vector<std::size_t> ClusteringResult::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (const auto& [id, cluster] : assignments) {
        if (cluster >= k) throw ContractError("assignment index out of range for " + id);
        ++sizes[cluster];
    }
    return sizes;
}

ClusteringResult canonical_display_order(ClusteringResult r,
                                         std::vector<std::size_t>* new_index_of_old) {
    const auto sizes = r.cluster_sizes();
    std::vector<std::size_t> order(r.k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        if (r.centroids[a] != r.centroids[b]) return r.centroids[a] < r.centroids[b];
        return a < b;
    });

    std::vector<std::size_t> new_index(r.k);
    for (std::size_t pos = 0; pos < order.size(); ++pos) new_index[order[pos]] = pos;

    ClusteringResult out = r;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        out.centroids[pos] = r.centroids[order[pos]];
        out.empty[pos] = r.empty[order[pos]];
    }
    for (auto& [id, cluster] : out.assignments) cluster = new_index[cluster];
    if (new_index_of_old) *new_index_of_old = std::move(new_index);
    return out;
}

double hex_x(NodeCoord c) { return static_cast<double>(c.col) + (c.row % 2 != 0 ? 0.5 : 0.0); }

double hex_y(NodeCoord c) { return static_cast<double>(c.row) * std::sqrt(3.0) / 2.0; }

double hex_node_distance(NodeCoord a, NodeCoord b, int width, int height) {
    const auto inside = [&](NodeCoord c) {
        return c.col >= 0 && c.col < width && c.row >= 0 && c.row < height;
    };
    if (!inside(a) || !inside(b)) {
        throw std::out_of_range("node coordinate outside " + std::to_string(width) + "x" +
                                std::to_string(height) + " grid");
    }
    const double dx = hex_x(a) - hex_x(b);
    const double dy = hex_y(a) - hex_y(b);
    return std::sqrt(dx * dx + dy * dy);
}

std::size_t SomGrid::index_of(NodeCoord c) const {
    if (c.col < 0 || c.col >= width || c.row < 0 || c.row >= height) {
        throw std::out_of_range("node coordinate outside grid");
    }
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.col);
}

NodeCoord SomGrid::coord_of(std::size_t index) const {
    if (index >= codebooks.size()) throw std::out_of_range("node index outside grid");
    const int w = width;
    return NodeCoord{static_cast<int>(index % static_cast<std::size_t>(w)),
                     static_cast<int>(index / static_cast<std::size_t>(w))};
}

double SomGrid::node_distance(NodeCoord a, NodeCoord b) const {
    return hex_node_distance(a, b, width, height);
}

}  // namespace loadshape
