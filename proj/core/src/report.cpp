#include "fern/bench.hpp"
#include "fern/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace fern {

namespace {

/// Shortest representation that parses back to the same double.
std::string number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string series_name(const BenchRecord& r) {
    if (!r.series.empty()) {
        return r.series;
    }
    return "d=" + std::to_string(r.d) + " " + to_string(r.mode);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

} // namespace

void emit_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
    out << "n,d,mode,mean_ns,p50_ns,p99_ns,mean_visited,max_visited,recall,build_ms,throughput_qps\n";
    for (const auto& r : records) {
        out << r.n << ',' << r.d << ',' << to_string(r.mode) << ',' << number(r.mean_ns) << ','
            << number(r.p50_ns) << ',' << number(r.p99_ns) << ',' << number(r.mean_visited) << ','
            << r.max_visited << ',' << number(r.recall) << ',' << number(r.build_ms) << ','
            << number(r.throughput_qps) << '\n';
    }
    if (!out) {
        throw IoError("failed writing CSV");
    }
}

void emit_json(const std::vector<BenchRecord>& records, std::ostream& out) {
    auto array = nlohmann::json::array();
    for (const auto& r : records) {
        array.push_back({
            {"n", r.n},
            {"d", r.d},
            {"mode", to_string(r.mode)},
            {"mean_ns", r.mean_ns},
            {"p50_ns", r.p50_ns},
            {"p99_ns", r.p99_ns},
            {"mean_visited", r.mean_visited},
            {"max_visited", r.max_visited},
            {"recall", r.recall},
            {"build_ms", r.build_ms},
            {"throughput_qps", r.throughput_qps},
        });
    }
    out << array.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing JSON");
    }
}

void emit_svg_plot(const std::vector<BenchRecord>& records, std::ostream& out) {
    if (records.size() < 2) {
        throw ArgumentError("a scaling plot needs at least two records");
    }

    // Series in order of first appearance.
    std::vector<std::pair<std::string, std::vector<const BenchRecord*>>> series;
    for (const auto& r : records) {
        const std::string name = series_name(r);
        auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) { return s.first == name; });
        if (it == series.end()) {
            series.push_back({name, {}});
            it = series.end() - 1;
        }
        it->second.push_back(&r);
    }
    for (auto& s : series) {
        std::sort(s.second.begin(), s.second.end(), [](const auto* a, const auto* b) { return a->n < b->n; });
    }

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_max = 0.0;
    for (const auto& r : records) {
        const double x = std::log10(static_cast<double>(std::max<std::size_t>(r.n, 1)));
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_max = std::max(y_max, r.mean_ns);
    }
    x_min = std::floor(x_min);
    x_max = std::ceil(x_max);
    if (x_max <= x_min) {
        x_max = x_min + 1.0;
    }
    y_max = y_max > 0.0 ? y_max * 1.1 : 1.0;

    constexpr double width = 800, height = 500;
    constexpr double left = 80, right = 200, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + plot_h - y / y_max * plot_h; };

    static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">FERN mean query latency</text>\n";

    // Axes and ticks.
    out << "<g stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h << "\"/>\n";
    out << "</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (double decade = x_min; decade <= x_max + 1e-9; decade += 1.0) {
        out << "<line x1=\"" << px(decade) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(decade) << "\" y2=\""
            << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(decade) << "\" y=\"" << top + plot_h + 20 << "\" text-anchor=\"middle\">1e"
            << static_cast<int>(decade) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double y = y_max * i / 5.0;
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << left << "\" y2=\"" << py(y)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
            << number(std::round(y)) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\">database size N (log scale)</text>\n";
    out << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << top + plot_h / 2 << ")\">mean latency (ns)</text>\n";
    out << "</g>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < series[s].second.size(); ++i) {
            const auto* r = series[s].second[i];
            out << (i ? " " : "") << px(std::log10(static_cast<double>(r->n))) << ',' << py(r->mean_ns);
        }
        out << "\"/>\n";
        for (const auto* r : series[s].second) {
            out << "<circle cx=\"" << px(std::log10(static_cast<double>(r->n))) << "\" cy=\"" << py(r->mean_ns)
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 10 + 20.0 * static_cast<double>(s);
        out << "<line x1=\"" << width - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 35
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right + 40 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(series[s].first) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) {
        throw IoError("failed writing SVG");
    }
}

void write_report(const std::vector<BenchRecord>& records, const std::string& path,
                  void (*emit)(const std::vector<BenchRecord>&, std::ostream&)) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    emit(records, out);
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

} // namespace fern
