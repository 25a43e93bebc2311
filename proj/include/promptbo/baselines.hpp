#pragma once

#include "promptbo/optimizer.hpp"

namespace promptbo {

/// Budget-matched random search: n_init + budget uniform prompts from the
/// seeded generator, scored in order and traced like a BO run. With the same
/// seed its first n_init prompts equal the BO run's initial design.
RunResult random_search(Objective& objective, const PromptSpace& space, const RunConfig& config, RunHooks hooks = {});

}  // namespace promptbo
