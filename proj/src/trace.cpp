#include "promptbo/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <sstream>

namespace promptbo {

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

std::string format_seconds(double seconds) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.9f", seconds);
    return buffer;
}

std::string format_trace_row(const Observation& observation, double best_seen) {
    std::string row = std::to_string(observation.iteration);
    row += ',';
    row += format_seconds(observation.elapsed_seconds);
    row += ',';
    for (std::size_t i = 0; i < observation.prompt.size(); ++i) {
        if (i > 0) {
            row += ' ';
        }
        row += std::to_string(observation.prompt[i]);
    }
    row += ',';
    row += format_double(observation.score);
    row += ',';
    row += format_double(best_seen);
    return row;
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw Error("cannot open trace file " + path.string());
    }
    out_ << kTraceHeader << '\n';
    out_.flush();
}

void TraceWriter::record(const Observation& observation, double best_seen) {
    out_ << format_trace_row(observation, best_seen) << '\n';
    out_.flush();
}

namespace {

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* column) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error("trace line " + std::to_string(line) + ": bad " + column + " \"" + std::string(field) + "\"");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw Error("trace line " + std::to_string(line) + ": non-finite " + column);
        }
    }
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

}  // namespace

std::vector<TraceRow> parse_trace(std::string_view text) {
    std::vector<TraceRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != kTraceHeader) {
                throw Error("trace line " + std::to_string(line_no) + ": expected header \"" +
                            std::string(kTraceHeader) + "\"");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 5) {
            throw Error("trace line " + std::to_string(line_no) + ": expected 5 fields, got " +
                        std::to_string(fields.size()));
        }
        TraceRow row;
        row.iteration = parse_number<std::size_t>(fields[0], line_no, "iteration");
        row.elapsed_seconds = parse_number<double>(fields[1], line_no, "elapsed_seconds");
        if (!fields[2].empty()) {
            for (const auto id : split(fields[2], ' ')) {
                row.prompt_ids.push_back(parse_number<TokenIndex>(id, line_no, "prompt id"));
            }
        }
        row.score = parse_number<double>(fields[3], line_no, "score");
        row.best_seen = parse_number<double>(fields[4], line_no, "best_seen");
        rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw Error("trace is empty");
    }
    return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
    try {
        return parse_trace(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace promptbo
