#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "promptbo/optimizer.hpp"

namespace promptbo::cli {

struct LookupSettings {
    std::uint64_t seed = 0;
};

struct RemoteSettings {
    std::string url;
    double timeout_s = 30.0;
    int retries = 2;
    std::string split = "dev";
};

enum class ClockKind { Wall, Tick };

/// A parsed run configuration file.
///
/// {
///   "task_preset": "mrpc",                 // or vocab_path / vocab_size + prompt_length
///   "vocab_path": "vocab.txt",
///   "vocab_size": 8,
///   "prompt_length": 4,
///   "objective": {"builtin": {"kind": "lookup", "seed": 0}}
///              | {"remote": {"url": "...", "timeout_s": 30, "retries": 2, "split": "dev"}},
///   "n_init": 10, "budget": 90, "top_b": 5, "beta": 2.0, "seed": 0,
///   "out_dir": "out",
///   "acquisition": {"n_restarts": 8, "n_raw_probes": 512, "max_ascent_steps": 50, "step_tolerance": 1e-6},
///   "clock": "wall" | "tick",
///   "cache_scores": false,
///   "skip_duplicates": false
/// }
///
/// Relative paths are resolved against the directory holding the config file.
struct CliConfig {
    std::optional<std::string> task_preset;
    std::optional<std::filesystem::path> vocab_path;
    std::size_t vocab_size = 0;
    std::size_t prompt_length = 0;
    std::variant<LookupSettings, RemoteSettings> objective;
    RunConfig run;
    std::filesystem::path out_dir;
    ClockKind clock = ClockKind::Wall;
    bool cache_scores = false;

    PromptSpace space() const { return PromptSpace(prompt_length, vocab_size); }
};

/// Throws ConfigError listing every invalid key, one per line.
CliConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir);
CliConfig load_config(const std::filesystem::path& path);

/// Full effective configuration; parse_config(echo_config(c), any) == c.
nlohmann::json echo_config(const CliConfig& config);

}  // namespace promptbo::cli
