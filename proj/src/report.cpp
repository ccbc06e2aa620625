#include "loadshape/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace loadshape {

namespace {

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Profile polyline inside a plot box, y fixed to [0,1] (bottom = 0).
void append_profile_polyline(std::string& svg, const Vector24& values, double x0, double y0,
                             double w, double h, const char* stroke, double stroke_width) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += stroke;
    svg += "\" stroke-width=\"" + fmt(stroke_width) + "\" points=\"";
    for (std::size_t hour = 0; hour < kHoursPerDay; ++hour) {
        const double px = x0 + w * static_cast<double>(hour) / (kHoursPerDay - 1);
        const double v = std::clamp(values[hour], 0.0, 1.0);
        const double py = y0 + h * (1.0 - v);
        if (hour > 0) svg += ' ';
        svg += fmt(px) + "," + fmt(py);
    }
    svg += "\"/>\n";
}

std::string svg_open(double width, double height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt(width, "%.0f") + "\" height=\"" + fmt(height, "%.0f") + "\" viewBox=\"0 0 " +
           fmt(width, "%.0f") + " " + fmt(height, "%.0f") + "\">\n";
}

void append_text(std::string& svg, double x, double y, const std::string& content,
                 int font_size = 12) {
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(font_size) + "\">" + xml_escape(content) + "</text>\n";
}

void append_rect(std::string& svg, double x, double y, double w, double h) {
    svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) + "\" height=\"" +
           fmt(h) + "\" fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>\n";
}

}  // namespace

std::string render_cluster_small_multiples(const ClusteringResult& result,
                                           const std::vector<MeanLoadProfile>& profiles) {
    if (result.k == 0) throw ContractError("cannot render an empty clustering result");

    std::vector<std::vector<const MeanLoadProfile*>> members(result.k);
    for (const auto& p : profiles) {
        const auto it = result.assignments.find(p.household_id);
        if (it != result.assignments.end() && it->second < result.k) {
            members[it->second].push_back(&p);
        }
    }

    const double panel_w = 220.0;
    const double panel_h = 150.0;
    const double gap = 10.0;
    const std::size_t ncols =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(result.k))));
    const std::size_t nrows = (result.k + ncols - 1) / ncols;
    const double width = gap + static_cast<double>(ncols) * (panel_w + gap);
    const double height = gap + static_cast<double>(nrows) * (panel_h + gap);

    std::string svg = svg_open(width, height);
    for (std::size_t c = 0; c < result.k; ++c) {
        const double px = gap + static_cast<double>(c % ncols) * (panel_w + gap);
        const double py = gap + static_cast<double>(c / ncols) * (panel_h + gap);
        std::string title = "Cluster" + std::to_string(c + 1);
        if (members[c].empty()) title += " (empty)";
        append_text(svg, px + 4, py + 14, title);
        const double box_x = px + 6;
        const double box_y = py + 20;
        const double box_w = panel_w - 12;
        const double box_h = panel_h - 28;
        append_rect(svg, box_x, box_y, box_w, box_h);
        for (const auto* p : members[c]) {
            append_profile_polyline(svg, p->values, box_x, box_y, box_w, box_h, "black", 1.0);
        }
        if (!members[c].empty()) {
            append_profile_polyline(svg, result.centroids[c], box_x, box_y, box_w, box_h, "red",
                                    2.0);
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_som_lattice(const SomGrid& grid) {
    if (grid.node_count() == 0) throw ContractError("cannot render an empty grid");
    const double tile_w = 150.0;
    const double tile_h = 100.0;
    const double gap = 8.0;
    const double row_offset = (tile_w + gap) / 2.0;  // odd rows shift right
    const double width =
        gap + static_cast<double>(grid.width) * (tile_w + gap) + row_offset;
    const double height = gap + static_cast<double>(grid.height) * (tile_h + gap);

    std::string svg = svg_open(width, height);
    for (std::size_t j = 0; j < grid.node_count(); ++j) {
        const NodeCoord c = grid.coord_of(j);
        const double px =
            gap + static_cast<double>(c.col) * (tile_w + gap) + (c.row % 2 != 0 ? row_offset : 0.0);
        const double py = gap + static_cast<double>(c.row) * (tile_h + gap);
        append_rect(svg, px, py, tile_w, tile_h);
        append_text(svg, px + 4, py + 13, "N" + std::to_string(j + 1), 11);
        append_profile_polyline(svg, grid.codebooks[j], px + 4, py + 18, tile_w - 8, tile_h - 24,
                                "black", 1.0);
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_elbow_svg(const std::vector<ElbowPoint>& curve) {
    if (curve.empty()) throw ContractError("cannot render an empty elbow curve");
    const double width = 640.0;
    const double height = 400.0;
    const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    double max_wcss = 0.0;
    for (const auto& p : curve) max_wcss = std::max(max_wcss, p.wcss);
    if (max_wcss <= 0.0) max_wcss = 1.0;
    const auto k_min = curve.front().k;
    const auto k_max = curve.back().k;
    const double k_span = k_max > k_min ? static_cast<double>(k_max - k_min) : 1.0;

    const auto x_of = [&](std::size_t k) {
        return ml + plot_w * static_cast<double>(k - k_min) / k_span;
    };
    const auto y_of = [&](double w) { return mt + plot_h * (1.0 - w / max_wcss); };

    std::string svg = svg_open(width, height);
    append_rect(svg, ml, mt, plot_w, plot_h);
    // y ticks
    for (int i = 0; i <= 4; ++i) {
        const double w = max_wcss * i / 4.0;
        append_text(svg, 6, y_of(w) + 4, fmt(w, "%.2f"), 11);
    }
    // x ticks, one per k
    for (const auto& p : curve) {
        append_text(svg, x_of(p.k) - 4, height - mb + 18, std::to_string(p.k), 11);
    }
    append_text(svg, ml + plot_w / 2 - 60, height - 8, "number of clusters k");
    append_text(svg, 6, 14, "WCSS");

    if (curve.size() > 1) {
        std::string points;
        for (const auto& p : curve) {
            if (!points.empty()) points += ' ';
            points += fmt(x_of(p.k)) + "," + fmt(y_of(p.wcss));
        }
        svg += "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"2\" points=\"" + points +
               "\"/>\n";
    }
    for (const auto& p : curve) {
        svg += "<circle cx=\"" + fmt(x_of(p.k)) + "\" cy=\"" + fmt(y_of(p.wcss)) +
               "\" r=\"3\" fill=\"blue\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void write_elbow_csv(std::ostream& out, const std::vector<ElbowPoint>& curve) {
    out << "k,wcss\n";
    char buf[48];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.7f", p.wcss);
        out << p.k << ',' << buf << '\n';
    }
}

std::vector<ElbowPoint> read_elbow_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty elbow CSV");
    std::vector<ElbowPoint> curve;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw InputError("malformed elbow CSV row: " + line);
        ElbowPoint p;
        {
            const char* first = line.data();
            auto [ptr, ec] = std::from_chars(first, first + comma, p.k);
            if (ec != std::errc{} || ptr != first + comma) {
                throw InputError("malformed elbow CSV row: " + line);
            }
        }
        {
            const char* first = line.data() + comma + 1;
            const char* last = line.data() + line.size();
            auto [ptr, ec] = std::from_chars(first, last, p.wcss);
            if (ec != std::errc{} || ptr != last) {
                throw InputError("malformed elbow CSV row: " + line);
            }
        }
        curve.push_back(p);
    }
    return curve;
}

void write_assignments_csv(std::ostream& out, const ClusteringResult& result) {
    out << "household_id,cluster\n";
    for (const auto& [id, cluster] : result.assignments) {
        out << id << ',' << cluster + 1 << '\n';
    }
}

void write_centroids_csv(std::ostream& out, const ClusteringResult& result) {
    out << "cluster,size";
    for (std::size_t h = 0; h < kHoursPerDay; ++h) out << ",h" << h;
    out << '\n';
    const auto sizes = result.cluster_sizes();
    char buf[32];
    for (std::size_t c = 0; c < result.k; ++c) {
        out << c + 1 << ',' << sizes[c];
        for (double v : result.centroids[c]) {
            std::snprintf(buf, sizeof(buf), "%.6f", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

ClusteringResult read_result_csvs(std::istream& assignments, std::istream& centroids) {
    ClusteringResult result;
    std::string line;

    if (!std::getline(centroids, line)) throw InputError("empty centroids CSV");
    std::vector<std::size_t> sizes;
    while (std::getline(centroids, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        std::size_t field = 0;
        Vector24 values{};
        std::size_t size = 0;
        while (start <= line.size() && field < kHoursPerDay + 2) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view f(line.data() + start, comma - start);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw InputError("malformed centroids CSV row: " + line);
            }
            if (field == 1) size = static_cast<std::size_t>(v);
            if (field >= 2) values[field - 2] = v;
            ++field;
            start = comma + 1;
        }
        if (field != kHoursPerDay + 2) throw InputError("malformed centroids CSV row: " + line);
        result.centroids.push_back(values);
        sizes.push_back(size);
    }
    result.k = result.centroids.size();
    result.empty.resize(result.k);
    for (std::size_t c = 0; c < result.k; ++c) result.empty[c] = sizes[c] == 0;

    if (!std::getline(assignments, line)) throw InputError("empty assignments CSV");
    while (std::getline(assignments, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw InputError("malformed assignments CSV row: " + line);
        std::size_t cluster = 0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, cluster);
        if (ec != std::errc{} || ptr != last || cluster == 0 || cluster > result.k) {
            throw InputError("malformed assignments CSV row: " + line);
        }
        result.assignments[line.substr(0, comma)] = cluster - 1;
    }
    return result;
}

void write_comparison_csv(std::ostream& out, const MethodComparison& cmp) {
    out << "method,mia,wcss,sizes\n";
    char buf[48];
    for (const auto& m : cmp.methods) {
        std::snprintf(buf, sizeof(buf), "%.7f", m.mia);
        out << method_name(m.method) << ',' << buf;
        std::snprintf(buf, sizeof(buf), "%.7f", m.wcss);
        out << ',' << buf << ',';
        for (std::size_t i = 0; i < m.sizes.size(); ++i) {
            if (i > 0) out << ';';
            out << m.sizes[i];
        }
        out << '\n';
    }
}

void write_comparison_json(std::ostream& out, const MethodComparison& cmp) {
    char buf[48];
    out << "{\n  \"methods\": [\n";
    for (std::size_t i = 0; i < cmp.methods.size(); ++i) {
        const auto& m = cmp.methods[i];
        out << "    {\"method\": \"" << method_name(m.method) << "\", ";
        std::snprintf(buf, sizeof(buf), "%.7f", m.mia);
        out << "\"mia\": " << buf << ", ";
        std::snprintf(buf, sizeof(buf), "%.7f", m.wcss);
        out << "\"wcss\": " << buf << ", \"sizes\": [";
        for (std::size_t s = 0; s < m.sizes.size(); ++s) {
            if (s > 0) out << ", ";
            out << m.sizes[s];
        }
        out << "]}" << (i + 1 < cmp.methods.size() ? "," : "") << '\n';
    }
    out << "  ],\n  \"best_method\": \"" << method_name(cmp.methods[cmp.best_index].method)
        << "\"\n}\n";
}

}  // namespace loadshape
