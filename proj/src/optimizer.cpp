#include "promptbo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace promptbo {

void RunConfig::validate() const {
    if (n_init < 1) {
        throw ConfigError("n_init must be at least 1");
    }
    if (top_b < 1 || top_b > n_init + budget) {
        throw ConfigError("top_b must be between 1 and n_init + budget (" + std::to_string(n_init + budget) + ")");
    }
    acquisition.validate();
}

void SteadyClock::start() {
    origin_ = std::chrono::steady_clock::now();
    last_ns_ = -1;
}

double SteadyClock::elapsed_seconds() {
    std::int64_t ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - origin_).count();
    ns = std::max(ns, last_ns_ + 1);
    last_ns_ = ns;
    return static_cast<double>(ns) * 1e-9;
}

std::vector<RankedPrompt> top_b(const std::vector<Observation>& observations, std::size_t b) {
    std::vector<RankedPrompt> ranked;
    ranked.reserve(observations.size());
    for (const Observation& o : observations) {
        ranked.push_back({o.iteration, o.prompt, o.score});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedPrompt& a, const RankedPrompt& b) { return a.score > b.score; });
    ranked.resize(std::min(b, ranked.size()));
    return ranked;
}

std::vector<TracePoint> best_seen_trace(const RunResult& result) {
    if (result.observations.empty()) {
        throw Error("best-seen trace of an empty run");
    }
    std::vector<TracePoint> trace;
    trace.reserve(result.observations.size());
    double best = -std::numeric_limits<double>::infinity();
    for (const Observation& o : result.observations) {
        best = std::max(best, o.score);
        trace.push_back({o.elapsed_seconds, best});
    }
    return trace;
}

namespace detail {

RunRecorder::RunRecorder(const PromptSpace& space, RunHooks hooks)
    : space_(space), clock_(hooks.clock ? hooks.clock : &default_clock_), sink_(hooks.sink) {
    clock_->start();
}

const Observation& RunRecorder::record(const DiscretePrompt& prompt, double score) {
    Observation o;
    o.iteration = result_.observations.size();
    o.prompt = prompt;
    o.point = encode(space_, prompt);
    o.score = score;
    o.elapsed_seconds = clock_->elapsed_seconds();
    const double best = result_.best_seen.empty() ? score : std::max(result_.best_seen.back(), score);
    result_.observations.push_back(std::move(o));
    result_.best_seen.push_back(best);
    if (sink_) {
        sink_->record(result_.observations.back(), best);
    }
    return result_.observations.back();
}

RunResult RunRecorder::finish(std::size_t top_b_count, std::size_t surrogate_size) {
    RunResult out = result_;
    out.top_prompts = top_b(out.observations, top_b_count);
    out.surrogate_size = surrogate_size;
    return out;
}

double evaluate_or_abort(Objective& objective, const DiscretePrompt& prompt, RunRecorder& recorder,
                         std::size_t top_b_count) {
    try {
        const double score = objective.evaluate(prompt);
        if (!std::isfinite(score)) {
            throw EvaluationError("objective returned a non-finite score");
        }
        return score;
    } catch (const EvaluationError& e) {
        throw RunAborted(std::string("run aborted after ") + std::to_string(recorder.result().observations.size()) +
                             " observations: " + e.what(),
                         recorder.finish(top_b_count, 0));
    }
}

}  // namespace detail

RunResult run(Objective& objective, const PromptSpace& space, const RunConfig& config, RunHooks hooks) {
    config.validate();
    if (!(objective.space() == space)) {
        throw ConfigError("objective space does not match the search space");
    }
    Rng rng(config.seed);
    detail::RunRecorder recorder(space, hooks);
    std::set<DiscretePrompt> seen;

    for (std::size_t i = 0; i < config.n_init; ++i) {
        const DiscretePrompt prompt = sample_uniform(space, rng);
        const double score = detail::evaluate_or_abort(objective, prompt, recorder, config.top_b);
        recorder.record(prompt, score);
        seen.insert(prompt);
    }

    std::vector<ContinuousPoint> inputs;
    std::vector<double> scores;
    for (const Observation& o : recorder.result().observations) {
        inputs.push_back(o.point);
        scores.push_back(o.score);
    }
    GPModel model = GPModel::fit(std::move(inputs), std::move(scores), config.fit);

    const auto total = cardinality(space);
    for (std::size_t k = 0; k < config.budget; ++k) {
        const AcquisitionResult proposal = maximize(model, space, config.acquisition, rng);
        DiscretePrompt prompt = decode(space, proposal.point);
        if (config.skip_duplicates && seen.contains(prompt) && total > seen.size()) {
            do {
                prompt = sample_uniform(space, rng);
            } while (seen.contains(prompt));
        }
        const double score = detail::evaluate_or_abort(objective, prompt, recorder, config.top_b);
        const Observation& o = recorder.record(prompt, score);
        seen.insert(prompt);
        model = model.update(o.point, score);
    }
    return recorder.finish(config.top_b, model.size());
}

}  // namespace promptbo
