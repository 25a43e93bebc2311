#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "promptbo/optimizer.hpp"

namespace promptbo {

inline constexpr std::string_view kTraceHeader = "iteration,elapsed_seconds,prompt_ids,score,best_seen";

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Fixed nanosecond resolution, e.g. "0.000123456".
std::string format_seconds(double seconds);

std::string format_trace_row(const Observation& observation, double best_seen);

/// Writes the trace CSV as a run progresses, flushing after every row so an
/// aborted run leaves a complete prefix on disk.
class TraceWriter final : public ObservationSink {
  public:
    // Truncates the file and writes the header. Throws Error if it cannot be opened.
    explicit TraceWriter(const std::filesystem::path& path);
    void record(const Observation& observation, double best_seen) override;

  private:
    std::ofstream out_;
};

struct TraceRow {
    std::size_t iteration = 0;
    double elapsed_seconds = 0.0;
    std::vector<TokenIndex> prompt_ids;
    double score = 0.0;
    double best_seen = 0.0;
};

/// Parses a trace CSV. Malformed rows raise Error naming the 1-based line.
std::vector<TraceRow> parse_trace(std::string_view text);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace promptbo
