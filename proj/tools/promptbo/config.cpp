#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "presets.hpp"
#include "promptbo/error.hpp"

namespace promptbo::cli {

using nlohmann::json;

namespace {

class Problems {
  public:
    void add(const std::string& key, const std::string& message) { lines_.push_back(key + ": " + message); }
    bool empty() const { return lines_.empty(); }
    std::string text() const {
        std::string out = "invalid configuration";
        for (const auto& l : lines_) {
            out += "\n  " + l;
        }
        return out;
    }

  private:
    std::vector<std::string> lines_;
};

void check_keys(const json& object, const std::set<std::string>& allowed, const std::string& prefix,
                Problems& problems) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) {
            problems.add(prefix + key, "unknown key");
        }
    }
}

template <class T>
std::optional<T> read_integer(const json& object, const std::string& key, const std::string& name, long double lo,
                              Problems& problems) {
    const auto it = object.find(key);
    if (it == object.end()) {
        return std::nullopt;
    }
    if (!it->is_number_integer()) {
        problems.add(name, "expected an integer");
        return std::nullopt;
    }
    if (it->is_number_unsigned()) {
        const auto v = it->get<std::uint64_t>();
        if (static_cast<long double>(v) < lo) {
            problems.add(name, "must be at least " + std::to_string(static_cast<long long>(lo)));
            return std::nullopt;
        }
        if (v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
            problems.add(name, "out of range");
            return std::nullopt;
        }
        return static_cast<T>(v);
    }
    const auto v = it->get<std::int64_t>();
    if (static_cast<long double>(v) < lo) {
        problems.add(name, "must be at least " + std::to_string(static_cast<long long>(lo)));
        return std::nullopt;
    }
    return static_cast<T>(v);
}

std::optional<double> read_number(const json& object, const std::string& key, const std::string& name,
                                  Problems& problems) {
    const auto it = object.find(key);
    if (it == object.end()) {
        return std::nullopt;
    }
    if (!it->is_number() || !std::isfinite(it->get<double>())) {
        problems.add(name, "expected a finite number");
        return std::nullopt;
    }
    return it->get<double>();
}

std::optional<std::string> read_string(const json& object, const std::string& key, const std::string& name,
                                       Problems& problems) {
    const auto it = object.find(key);
    if (it == object.end()) {
        return std::nullopt;
    }
    if (!it->is_string() || it->get<std::string>().empty()) {
        problems.add(name, "expected a non-empty string");
        return std::nullopt;
    }
    return it->get<std::string>();
}

std::optional<bool> read_bool(const json& object, const std::string& key, Problems& problems) {
    const auto it = object.find(key);
    if (it == object.end()) {
        return std::nullopt;
    }
    if (!it->is_boolean()) {
        problems.add(key, "expected true or false");
        return std::nullopt;
    }
    return it->get<bool>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

void parse_objective(const json& doc, CliConfig& config, Problems& problems) {
    const auto it = doc.find("objective");
    if (it == doc.end()) {
        problems.add("objective", "missing");
        return;
    }
    if (!it->is_object() || it->size() != 1 || !(it->contains("builtin") || it->contains("remote"))) {
        problems.add("objective", "expected exactly one of {\"builtin\": {...}} or {\"remote\": {...}}");
        return;
    }
    if (const auto b = it->find("builtin"); b != it->end()) {
        if (!b->is_object()) {
            problems.add("objective.builtin", "expected an object");
            return;
        }
        check_keys(*b, {"kind", "seed"}, "objective.builtin.", problems);
        const auto kind = read_string(*b, "kind", "objective.builtin.kind", problems);
        if (!kind) {
            if (!b->contains("kind")) problems.add("objective.builtin.kind", "missing");
        } else if (*kind != "lookup") {
            problems.add("objective.builtin.kind", "unknown builtin objective \"" + *kind + "\" (expected \"lookup\")");
        }
        LookupSettings settings;
        if (auto s = read_integer<std::uint64_t>(*b, "seed", "objective.builtin.seed", 0, problems)) settings.seed = *s;
        config.objective = settings;
        return;
    }
    const auto& r = it->at("remote");
    if (!r.is_object()) {
        problems.add("objective.remote", "expected an object");
        return;
    }
    check_keys(r, {"url", "timeout_s", "retries", "split"}, "objective.remote.", problems);
    RemoteSettings settings;
    if (auto url = read_string(r, "url", "objective.remote.url", problems)) settings.url = *url;
    if (auto t = read_number(r, "timeout_s", "objective.remote.timeout_s", problems)) {
        if (*t <= 0.0) {
            problems.add("objective.remote.timeout_s", "must be positive");
        } else {
            settings.timeout_s = *t;
        }
    }
    if (auto n = read_integer<int>(r, "retries", "objective.remote.retries", 0, problems)) settings.retries = *n;
    if (auto s = read_string(r, "split", "objective.remote.split", problems)) settings.split = *s;
    config.objective = settings;
}

void parse_acquisition(const json& doc, AcquisitionConfig& acq, Problems& problems) {
    const auto it = doc.find("acquisition");
    if (it == doc.end()) {
        return;
    }
    if (!it->is_object()) {
        problems.add("acquisition", "expected an object");
        return;
    }
    check_keys(*it, {"n_restarts", "n_raw_probes", "max_ascent_steps", "step_tolerance"}, "acquisition.", problems);
    if (auto v = read_integer<int>(*it, "n_restarts", "acquisition.n_restarts", 1, problems)) acq.n_restarts = *v;
    if (auto v = read_integer<int>(*it, "n_raw_probes", "acquisition.n_raw_probes", 1, problems)) acq.n_raw_probes = *v;
    if (auto v = read_integer<int>(*it, "max_ascent_steps", "acquisition.max_ascent_steps", 1, problems)) {
        acq.max_ascent_steps = *v;
    }
    if (auto v = read_number(*it, "step_tolerance", "acquisition.step_tolerance", problems)) {
        if (*v <= 0.0) {
            problems.add("acquisition.step_tolerance", "must be positive");
        } else {
            acq.step_tolerance = *v;
        }
    }
    if (acq.n_raw_probes < acq.n_restarts) {
        problems.add("acquisition.n_raw_probes", "must be at least n_restarts");
    }
}

}  // namespace

CliConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    Problems problems;
    check_keys(doc,
               {"task_preset", "vocab_path", "vocab_size", "prompt_length", "objective", "n_init", "budget", "top_b",
                "beta", "seed", "out_dir", "acquisition", "clock", "cache_scores", "skip_duplicates"},
               "", problems);
    CliConfig config;

    if (auto name = read_string(doc, "task_preset", "task_preset", problems)) {
        if (const TaskPreset* preset = find_preset(*name)) {
            config.task_preset = preset->name;
            config.vocab_size = preset->vocab_size;
            config.prompt_length = preset->prompt_length;
        } else {
            problems.add("task_preset", "unknown task \"" + *name + "\"");
        }
    }
    if (auto p = read_string(doc, "vocab_path", "vocab_path", problems)) {
        config.vocab_path = resolve(base_dir, *p);
    }
    if (auto v = read_integer<std::size_t>(doc, "vocab_size", "vocab_size", 2, problems)) {
        if (config.task_preset && *v != config.vocab_size) {
            problems.add("vocab_size", "conflicts with task_preset " + *config.task_preset + " (" +
                                           std::to_string(config.vocab_size) + ")");
        }
        config.vocab_size = *v;
    }
    if (auto v = read_integer<std::size_t>(doc, "prompt_length", "prompt_length", 1, problems)) {
        config.prompt_length = *v;
    }
    if (!config.task_preset && !config.vocab_path && !doc.contains("vocab_size")) {
        problems.add("vocab_path", "need task_preset, vocab_path or vocab_size");
    }
    if (config.prompt_length == 0 && !doc.contains("prompt_length")) {
        problems.add("prompt_length", "missing (or set task_preset)");
    }

    parse_objective(doc, config, problems);
    if (std::holds_alternative<RemoteSettings>(config.objective) && !config.vocab_path) {
        problems.add("vocab_path", "a remote objective needs the vocabulary file to render prompt text");
    }

    RunConfig& run = config.run;
    if (auto v = read_integer<std::size_t>(doc, "n_init", "n_init", 1, problems)) run.n_init = *v;
    if (auto v = read_integer<std::size_t>(doc, "budget", "budget", 0, problems)) run.budget = *v;
    if (auto v = read_integer<std::size_t>(doc, "top_b", "top_b", 1, problems)) run.top_b = *v;
    if (run.top_b > run.n_init + run.budget) {
        problems.add("top_b", "must not exceed n_init + budget");
    }
    if (auto v = read_number(doc, "beta", "beta", problems)) {
        if (*v < 0.0) {
            problems.add("beta", "must be non-negative");
        } else {
            run.acquisition.beta = *v;
        }
    }
    if (auto v = read_integer<std::uint64_t>(doc, "seed", "seed", 0, problems)) run.seed = *v;
    parse_acquisition(doc, run.acquisition, problems);
    if (auto v = read_bool(doc, "skip_duplicates", problems)) run.skip_duplicates = *v;
    if (auto v = read_bool(doc, "cache_scores", problems)) config.cache_scores = *v;

    config.out_dir = resolve(base_dir, "out");
    if (auto v = read_string(doc, "out_dir", "out_dir", problems)) config.out_dir = resolve(base_dir, *v);

    if (auto v = read_string(doc, "clock", "clock", problems)) {
        if (*v == "wall") {
            config.clock = ClockKind::Wall;
        } else if (*v == "tick") {
            config.clock = ClockKind::Tick;
        } else {
            problems.add("clock", "expected \"wall\" or \"tick\"");
        }
    }

    if (!problems.empty()) {
        throw ConfigError(problems.text());
    }
    return config;
}

CliConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buffer.str());
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": malformed JSON: " + e.what());
    }
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_config(doc, std::filesystem::absolute(base));
}

json echo_config(const CliConfig& config) {
    json j = json::object();
    if (config.task_preset) j["task_preset"] = *config.task_preset;
    if (config.vocab_path) j["vocab_path"] = config.vocab_path->string();
    if (config.vocab_size != 0) j["vocab_size"] = config.vocab_size;
    j["prompt_length"] = config.prompt_length;
    if (const auto* lookup = std::get_if<LookupSettings>(&config.objective)) {
        j["objective"] = {{"builtin", {{"kind", "lookup"}, {"seed", lookup->seed}}}};
    } else {
        const auto& r = std::get<RemoteSettings>(config.objective);
        j["objective"] = {
            {"remote", {{"url", r.url}, {"timeout_s", r.timeout_s}, {"retries", r.retries}, {"split", r.split}}}};
    }
    const RunConfig& run = config.run;
    j["n_init"] = run.n_init;
    j["budget"] = run.budget;
    j["top_b"] = run.top_b;
    j["beta"] = run.acquisition.beta;
    j["seed"] = run.seed;
    j["acquisition"] = {{"n_restarts", run.acquisition.n_restarts},
                        {"n_raw_probes", run.acquisition.n_raw_probes},
                        {"max_ascent_steps", run.acquisition.max_ascent_steps},
                        {"step_tolerance", run.acquisition.step_tolerance}};
    j["skip_duplicates"] = run.skip_duplicates;
    j["cache_scores"] = config.cache_scores;
    j["clock"] = config.clock == ClockKind::Tick ? "tick" : "wall";
    j["out_dir"] = config.out_dir.string();
    return j;
}

}  // namespace promptbo::cli
