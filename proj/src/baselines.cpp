#include "promptbo/baselines.hpp"

namespace promptbo {

RunResult random_search(Objective& objective, const PromptSpace& space, const RunConfig& config, RunHooks hooks) {
    config.validate();
    if (!(objective.space() == space)) {
        throw ConfigError("objective space does not match the search space");
    }
    Rng rng(config.seed);
    detail::RunRecorder recorder(space, hooks);
    const std::size_t total = config.n_init + config.budget;
    for (std::size_t i = 0; i < total; ++i) {
        const DiscretePrompt prompt = sample_uniform(space, rng);
        const double score = detail::evaluate_or_abort(objective, prompt, recorder, config.top_b);
        recorder.record(prompt, score);
    }
    return recorder.finish(config.top_b, 0);
}

}  // namespace promptbo
