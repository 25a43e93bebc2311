#include "plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "promptbo/error.hpp"
#include "promptbo/trace.hpp"

namespace promptbo::cli {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
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

double parse_real(std::string_view field, std::size_t line) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || end != field.data() + field.size() || !std::isfinite(v)) {
        throw Error("series line " + std::to_string(line) + ": bad number \"" + std::string(field) + "\"");
    }
    return v;
}

std::string_view first_line(std::string_view text) {
    std::string_view l = text.substr(0, text.find('\n'));
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    return l;
}

}  // namespace

bool Series::operator==(const Series& other) const {
    if (label != other.label || points.size() != other.points.size()) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].elapsed_seconds != other.points[i].elapsed_seconds ||
            points[i].best_seen != other.points[i].best_seen) {
            return false;
        }
    }
    return true;
}

std::vector<Series> parse_series_csv(std::string_view text) {
    if (first_line(text) != kSeriesHeader) {
        throw Error("series line 1: expected header \"" + std::string(kSeriesHeader) + "\"");
    }
    std::vector<Series> out;
    std::size_t pos = text.find('\n');
    std::size_t line_no = 1;
    while (pos != std::string_view::npos && pos + 1 < text.size()) {
        ++line_no;
        const std::size_t start = pos + 1;
        std::string label;
        std::size_t i = start;
        if (text[i] == '"') {
            ++i;
            for (;; ++i) {
                if (i >= text.size()) throw Error("series line " + std::to_string(line_no) + ": unterminated quote");
                if (text[i] == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        label += '"';
                        ++i;
                        continue;
                    }
                    ++i;
                    break;
                }
                label += text[i];
            }
        } else {
            while (i < text.size() && text[i] != ',' && text[i] != '\n') label += text[i++];
        }
        pos = text.find('\n', i);
        std::string_view rest = text.substr(i, pos == std::string_view::npos ? std::string_view::npos : pos - i);
        if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
        if (label.empty() && rest.empty()) continue;
        if (rest.empty() || rest.front() != ',') {
            throw Error("series line " + std::to_string(line_no) + ": expected 3 fields");
        }
        rest.remove_prefix(1);
        const auto comma = rest.find(',');
        if (comma == std::string_view::npos || rest.find(',', comma + 1) != std::string_view::npos) {
            throw Error("series line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const TracePoint p{parse_real(rest.substr(0, comma), line_no), parse_real(rest.substr(comma + 1), line_no)};
        auto it = std::find_if(out.begin(), out.end(), [&](const Series& s) { return s.label == label; });
        if (it == out.end()) {
            out.push_back({label, {}});
            it = std::prev(out.end());
        }
        it->points.push_back(p);
    }
    if (out.empty()) {
        throw Error("series file has no rows");
    }
    return out;
}

std::vector<Series> read_series(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        if (first_line(text) == kSeriesHeader) {
            return parse_series_csv(text);
        }
        Series s{path.string(), {}};
        for (const auto& row : parse_trace(text)) {
            s.points.push_back({row.elapsed_seconds, row.best_seen});
        }
        return {std::move(s)};
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string series_to_csv(const std::vector<Series>& series) {
    std::string out = std::string(kSeriesHeader) + "\n";
    for (const auto& s : series) {
        const std::string label = csv_field(s.label);
        for (const auto& p : s.points) {
            out += label + "," + format_double(p.elapsed_seconds) + "," + format_double(p.best_seen) + "\n";
        }
    }
    return out;
}

std::string series_to_svg(const std::vector<Series>& series) {
    constexpr double width = 720, height = 432, left = 70, right = 200, top = 20, bottom = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    double x_max = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -y_min;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            x_max = std::max(x_max, p.elapsed_seconds);
            y_min = std::min(y_min, p.best_seen);
            y_max = std::max(y_max, p.best_seen);
        }
    }
    if (x_max <= 0.0) x_max = 1.0;
    if (!(y_max > y_min)) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto sx = [&](double x) { return left + pw * x / x_max; };
    auto sy = [&](double y) { return top + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        width, height);
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
                       top, pw, ph);
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_max * i / 4.0;
        const double yv = y_min + (y_max - y_min) * i / 4.0;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", sx(xv),
                           top + ph + 18, xv);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 6,
                           sy(yv) + 4, yv);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">elapsed seconds</text>\n",
                       left + pw / 2, height - 10);
    svg += fmt::format(
        "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">best seen</text>\n",
        top + ph / 2, top + ph / 2);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        std::string points;
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            if (i > 0) {
                points += fmt::format("{:.2f},{:.2f} ", sx(p.elapsed_seconds), sy(s.points[i - 1].best_seen));
            }
            points += fmt::format("{:.2f},{:.2f} ", sx(p.elapsed_seconds), sy(p.best_seen));
        }
        if (!points.empty()) points.pop_back();
        svg += fmt::format("<polyline class=\"series\" data-label=\"{}\" fill=\"none\" stroke=\"{}\" "
                           "stroke-width=\"1.5\" points=\"{}\"/>\n",
                           xml_escape(s.label), color, points);
        const double ly = top + 14 + 18 * static_cast<double>(k);
        svg += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           width - right + 10, ly - 4, width - right + 30, ly - 4, color);
        svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\">{}</text>\n", width - right + 36, ly, xml_escape(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace promptbo::cli
