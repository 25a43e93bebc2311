#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "promptbo/optimizer.hpp"

namespace promptbo::cli {

inline constexpr std::string_view kSeriesHeader = "series,elapsed_seconds,best_seen";

struct Series {
    std::string label;
    std::vector<TracePoint> points;

    bool operator==(const Series& other) const;
};

// A trace CSV gives one series labelled by its path; a tidy CSV gives one
// series per distinct label, in order of first appearance.
std::vector<Series> read_series(const std::filesystem::path& path);
std::vector<Series> parse_series_csv(std::string_view text);

std::string series_to_csv(const std::vector<Series>& series);
std::string series_to_svg(const std::vector<Series>& series);

}  // namespace promptbo::cli
