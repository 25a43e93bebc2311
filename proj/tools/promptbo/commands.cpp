#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "plot.hpp"
#include "promptbo/baselines.hpp"
#include "promptbo/error.hpp"
#include "promptbo/objective.hpp"
#include "promptbo/optimizer.hpp"
#include "promptbo/trace.hpp"
#include "promptbo/vocab.hpp"

namespace promptbo::cli {

using nlohmann::json;

namespace {

// Everything a run needs, built before any output file is touched.
struct Session {
    CliConfig config;
    std::shared_ptr<const Vocabulary> vocab;
    std::unique_ptr<Objective> objective;
    std::unique_ptr<std::ofstream> scorer_log;
};

Session open_session(const std::filesystem::path& config_path, const std::optional<std::string>& scorer_url) {
    Session s;
    s.config = load_config(config_path);
    CliConfig& c = s.config;
    if (auto* remote = std::get_if<RemoteSettings>(&c.objective); remote && scorer_url) {
        remote->url = *scorer_url;
    }
    if (c.vocab_path) {
        s.vocab = std::make_shared<const Vocabulary>(load_vocabulary(*c.vocab_path));
        if (c.vocab_size != 0 && c.vocab_size != s.vocab->size()) {
            throw ConfigError(fmt::format("{} has {} entries but the configuration expects {}", c.vocab_path->string(),
                                          s.vocab->size(), c.vocab_size));
        }
        c.vocab_size = s.vocab->size();
    }
    c.run.validate();
    const PromptSpace space = c.space();

    if (const auto* lookup = std::get_if<LookupSettings>(&c.objective)) {
        try {
            s.objective = std::make_unique<LookupObjective>(space, lookup->seed);
        } catch (const SpaceError& e) {
            throw ConfigError(std::string("lookup objective: ") + e.what());
        }
    } else {
        const auto& r = std::get<RemoteSettings>(c.objective);
        if (r.url.empty()) {
            throw ConfigError(std::string("objective.remote.url: missing (set it or ") + kScorerUrlEnv + ")");
        }
        std::filesystem::create_directories(c.out_dir);
        s.scorer_log = std::make_unique<std::ofstream>(c.out_dir / "scorer.log", std::ios::app);
        RemoteScorerOptions options;
        options.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(r.timeout_s * 1000.0)));
        options.retries = r.retries;
        options.split = r.split;
        options.log = [log = s.scorer_log.get()](const std::string& line) { *log << line << '\n' << std::flush; };
        s.objective = remote_scorer(space, s.vocab, r.url, options);
    }
    if (c.cache_scores) {
        s.objective = std::make_unique<CachingObjective>(std::move(s.objective));
    }
    return s;
}

std::unique_ptr<Clock> make_clock(ClockKind kind) {
    if (kind == ClockKind::Tick) {
        return std::make_unique<TickClock>();
    }
    return std::make_unique<SteadyClock>();
}

json prompts_json(const std::vector<RankedPrompt>& ranked, const Vocabulary* vocab) {
    json out = json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = ranked[i];
        json p = {{"rank", i + 1}, {"iteration", r.iteration}, {"prompt_ids", r.prompt.indices()}, {"score", r.score}};
        p["text"] = vocab ? json(render_prompt(*vocab, r.prompt)) : json(nullptr);
        out.push_back(std::move(p));
    }
    return out;
}

void write_result(const Session& s, const RunResult& result, const std::string& status, const std::string& error) {
    json j;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["seed"] = s.config.run.seed;
    j["config"] = echo_config(s.config);
    j["n_observations"] = result.observations.size();
    j["best_seen"] = result.best_seen.empty() ? json(nullptr) : json(result.best_seen.back());
    j["elapsed_seconds"] = result.observations.empty() ? 0.0 : result.observations.back().elapsed_seconds;
    j["top_prompts"] = prompts_json(result.top_prompts, s.vocab.get());
    std::ofstream out(s.config.out_dir / "result.json", std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) {
        throw Error("cannot write " + (s.config.out_dir / "result.json").string());
    }
}

// Config, vocabulary and space problems map to exit 1.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const VocabError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SpaceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const EvaluationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitObjective;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::optional<std::string> scorer_url_from_env() {
    const char* v = std::getenv(kScorerUrlEnv);
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    return std::string(v);
}

int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Session s = open_session(options.config_path, options.scorer_url);
        if (options.seed) s.config.run.seed = *options.seed;
        if (options.beta) {
            if (!(*options.beta >= 0.0) || !std::isfinite(*options.beta)) {
                throw ConfigError("--beta must be a non-negative number");
            }
            s.config.run.acquisition.beta = *options.beta;
        }
        std::filesystem::create_directories(s.config.out_dir);
        const auto trace_path = s.config.out_dir / "trace.csv";
        TraceWriter writer(trace_path);
        auto clock = make_clock(s.config.clock);
        const PromptSpace space = s.config.space();
        try {
            const RunResult result = run(*s.objective, space, s.config.run, {clock.get(), &writer});
            write_result(s, result, "ok", "");
            out << fmt::format("best_seen {} after {} evaluations\n", format_double(result.best_seen.back()),
                               result.observations.size());
            out << "trace: " << trace_path.string() << '\n';
            return kExitOk;
        } catch (const RunAborted& e) {
            write_result(s, e.partial(), "aborted", e.what());
            err << "error: " << e.what() << '\n';
            err << "partial trace: " << trace_path.string() << '\n';
            return kExitObjective;
        }
    });
}

int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::set<std::string> distinct;
        for (const auto& m : options.methods) {
            if (m != "bo" && m != "random") {
                throw ConfigError("unknown method \"" + m + "\" (expected bo or random)");
            }
            if (!distinct.insert(m).second) {
                throw ConfigError("method \"" + m + "\" listed twice");
            }
        }
        if (distinct.size() < 2) {
            throw ConfigError("compare needs at least two methods");
        }
        Session s = open_session(options.config_path, options.scorer_url);
        std::vector<std::uint64_t> seeds = options.seeds;
        if (seeds.empty()) seeds.push_back(s.config.run.seed);

        std::filesystem::create_directories(s.config.out_dir);
        const auto csv_path = s.config.out_dir / "compare.csv";
        std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
        if (!csv) throw Error("cannot write " + csv_path.string());
        csv << "method,seed,iteration,elapsed_seconds,best_seen\n";

        const PromptSpace space = s.config.space();
        struct Summary {
            std::vector<double> finals;
            double seconds = 0.0;
        };
        std::map<std::string, Summary> summary;
        for (const auto& method : options.methods) {
            for (std::uint64_t seed : seeds) {
                RunConfig run_config = s.config.run;
                run_config.seed = seed;
                auto clock = make_clock(s.config.clock);
                RunResult result;
                try {
                    result = method == "bo" ? run(*s.objective, space, run_config, {clock.get(), nullptr})
                                            : random_search(*s.objective, space, run_config, {clock.get(), nullptr});
                } catch (const RunAborted& e) {
                    err << "error: " << method << " seed " << seed << ": " << e.what() << '\n';
                    return kExitObjective;
                }
                for (std::size_t i = 0; i < result.observations.size(); ++i) {
                    const auto& o = result.observations[i];
                    csv << method << ',' << seed << ',' << o.iteration << ',' << format_seconds(o.elapsed_seconds)
                        << ',' << format_double(result.best_seen[i]) << '\n';
                }
                csv.flush();
                summary[method].finals.push_back(result.best_seen.back());
                summary[method].seconds += result.observations.back().elapsed_seconds;
            }
        }

        const auto summary_path = s.config.out_dir / "summary.csv";
        std::ofstream sum(summary_path, std::ios::binary | std::ios::trunc);
        if (!sum) throw Error("cannot write " + summary_path.string());
        sum << "method,runs,mean_best_seen,std_best_seen,total_seconds\n";
        out << fmt::format("{:<8} {:>5} {:>14} {:>14} {:>14}\n", "method", "runs", "mean_best", "std_best",
                           "total_seconds");
        for (const auto& method : options.methods) {
            const Summary& m = summary[method];
            sum << method << ',' << m.finals.size() << ',' << format_double(mean(m.finals)) << ','
                << format_double(sample_std(m.finals)) << ',' << format_seconds(m.seconds) << '\n';
            out << fmt::format("{:<8} {:>5} {:>14.6f} {:>14.6f} {:>14.3f}\n", method, m.finals.size(), mean(m.finals),
                               sample_std(m.finals), m.seconds);
        }
        return kExitOk;
    });
}

int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (options.inputs.empty()) {
            throw ConfigError("plot needs at least one input file");
        }
        std::vector<Series> series;
        for (const auto& path : options.inputs) {
            for (auto& s : read_series(path)) {
                series.push_back(std::move(s));
            }
        }
        const auto target = options.output.value_or(options.data_only ? "plot.csv" : "plot.svg");
        std::ofstream file(target, std::ios::binary | std::ios::trunc);
        if (!file) throw Error("cannot write " + target.string());
        file << (options.data_only ? series_to_csv(series) : series_to_svg(series));
        if (!file) throw Error("cannot write " + target.string());
        out << fmt::format("{} series written to {}\n", series.size(), target.string());
        return kExitOk;
    });
}

}  // namespace promptbo::cli
