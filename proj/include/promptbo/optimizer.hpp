#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "promptbo/acquisition.hpp"
#include "promptbo/error.hpp"
#include "promptbo/gp.hpp"
#include "promptbo/objective.hpp"
#include "promptbo/space.hpp"

namespace promptbo {

struct RunConfig {
    std::size_t n_init = 10;
    std::size_t budget = 90;
    std::size_t top_b = 5;
    std::uint64_t seed = 0;
    AcquisitionConfig acquisition;
    FitConfig fit;
    // Replace proposals that repeat an evaluated prompt with a fresh uniform
    // draw of an unevaluated one.
    bool skip_duplicates = false;

    // Throws ConfigError unless n_init >= 1, 1 <= top_b <= n_init + budget
    // and the acquisition settings are valid.
    void validate() const;
};

struct Observation {
    std::size_t iteration = 0;
    DiscretePrompt prompt;
    ContinuousPoint point;
    double score = 0.0;
    double elapsed_seconds = 0.0;
};

struct RankedPrompt {
    std::size_t iteration = 0;
    DiscretePrompt prompt;
    double score = 0.0;
};

struct RunResult {
    std::vector<Observation> observations;
    // Running maximum of observed scores, one entry per observation.
    std::vector<double> best_seen;
    std::vector<RankedPrompt> top_prompts;
    // Rows in the surrogate's training set when the run ended (0 for
    // methods without a surrogate).
    std::size_t surrogate_size = 0;
};

/// Seconds since the start of a run, strictly increasing across readings.
class Clock {
  public:
    virtual ~Clock() = default;
    virtual void start() = 0;
    virtual double elapsed_seconds() = 0;
};

/// Wall clock (steady). A reading that would not advance is bumped by 1 ns.
class SteadyClock final : public Clock {
  public:
    void start() override;
    double elapsed_seconds() override;

  private:
    std::chrono::steady_clock::time_point origin_{};
    std::int64_t last_ns_ = -1;
};

/// Deterministic clock: the k-th reading after start() is k * tick seconds.
class TickClock final : public Clock {
  public:
    explicit TickClock(double tick_seconds = 0.001) : tick_(tick_seconds) {}
    void start() override { count_ = 0; }
    double elapsed_seconds() override { return static_cast<double>(++count_) * tick_; }

  private:
    double tick_;
    std::uint64_t count_ = 0;
};

/// Receives every observation as soon as it is committed.
class ObservationSink {
  public:
    virtual ~ObservationSink() = default;
    virtual void record(const Observation& observation, double best_seen) = 0;
};

struct RunHooks {
    Clock* clock = nullptr;       // defaults to a SteadyClock
    ObservationSink* sink = nullptr;
};

/// Thrown when the objective fails mid-run. Everything observed before the
/// failure is in partial() and has already been passed to the sink.
class RunAborted : public Error {
  public:
    RunAborted(const std::string& message, RunResult partial) : Error(message), partial_(std::move(partial)) {}
    const RunResult& partial() const noexcept { return partial_; }

  private:
    RunResult partial_;
};

/// Bayesian optimisation over prompts: score n_init uniform prompts, fit the
/// GP, then for each of `budget` iterations maximise UCB, round to a prompt,
/// score it and refit on the snapped point encode(decode(x)).
RunResult run(Objective& objective, const PromptSpace& space, const RunConfig& config, RunHooks hooks = {});

/// The b highest observed scores in descending order; ties keep the earlier
/// iteration first. Returns everything when b exceeds the observation count.
std::vector<RankedPrompt> top_b(const std::vector<Observation>& observations, std::size_t b);

struct TracePoint {
    double elapsed_seconds = 0.0;
    double best_seen = 0.0;
};

/// (elapsed, running max) per observation. Throws Error on an empty result.
std::vector<TracePoint> best_seen_trace(const RunResult& result);

namespace detail {

// Shared bookkeeping for every search method: timing, running max, sink.
class RunRecorder {
  public:
    RunRecorder(const PromptSpace& space, RunHooks hooks);

    const Observation& record(const DiscretePrompt& prompt, double score);
    RunResult& result() noexcept { return result_; }
    RunResult finish(std::size_t top_b, std::size_t surrogate_size);

  private:
    const PromptSpace& space_;
    SteadyClock default_clock_;
    Clock* clock_;
    ObservationSink* sink_;
    RunResult result_;
};

// Scores a prompt, turning any evaluation failure into RunAborted.
double evaluate_or_abort(Objective& objective, const DiscretePrompt& prompt, RunRecorder& recorder,
                         std::size_t top_b);

}  // namespace detail

}  // namespace promptbo
