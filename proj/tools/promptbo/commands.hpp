#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace promptbo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitObjective = 2;

inline constexpr const char* kScorerUrlEnv = "PROMPTBO_SCORER_URL";

struct OptimizeOptions {
    std::filesystem::path config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    // Replaces the remote objective's URL (normally from PROMPTBO_SCORER_URL).
    std::optional<std::string> scorer_url;
};

struct CompareOptions {
    std::filesystem::path config_path;
    std::vector<std::string> methods{"bo", "random"};
    // Empty means the config's own seed.
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> scorer_url;
};

struct PlotOptions {
    std::vector<std::filesystem::path> inputs;
    bool data_only = false;
    // Defaults to plot.svg, or plot.csv with data_only.
    std::optional<std::filesystem::path> output;
};

// Writes out_dir/trace.csv and out_dir/result.json.
int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err);

// Writes out_dir/compare.csv and out_dir/summary.csv, and prints the summary.
int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err);

// Accepts trace CSVs and the tidy CSV written by --data-only.
int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err);

std::optional<std::string> scorer_url_from_env();

}  // namespace promptbo::cli
