#include <doctest.h>

#include "promptbo/baselines.hpp"
#include "scripted_objective.hpp"

using namespace promptbo;

namespace {

RunConfig config(std::uint64_t seed, std::size_t n_init, std::size_t budget) {
    RunConfig c;
    c.seed = seed;
    c.n_init = n_init;
    c.budget = budget;
    c.top_b = 1;
    return c;
}

}  // namespace

TEST_CASE("random search is deterministic per seed") {
    const PromptSpace space(3, 7);
    auto objective = make_lookup_objective(space, 1);
    TickClock c1, c2;
    const auto a = random_search(objective, space, config(5, 4, 20), {&c1, nullptr});
    const auto b = random_search(objective, space, config(5, 4, 20), {&c2, nullptr});
    REQUIRE(a.observations.size() == 24);
    for (std::size_t i = 0; i < 24; ++i) {
        CHECK(a.observations[i].prompt == b.observations[i].prompt);
        CHECK(a.observations[i].elapsed_seconds == b.observations[i].elapsed_seconds);
    }
    CHECK(a.surrogate_size == 0);
}

TEST_CASE("a single draw is its own best") {
    const PromptSpace space(2, 4);
    auto objective = make_lookup_objective(space, 8);
    const auto r = random_search(objective, space, config(3, 1, 0));
    REQUIRE(r.observations.size() == 1);
    CHECK(r.best_seen.back() == objective.table()[objective.table_index(r.observations[0].prompt)]);
}

TEST_CASE("random search shares the initial design of a BO run") {
    const PromptSpace space(3, 9);
    auto objective = make_lookup_objective(space, 2);
    auto c = config(12, 6, 3);
    c.acquisition.n_raw_probes = 64;
    const auto bo = run(objective, space, c);
    const auto rs = random_search(objective, space, c);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(bo.observations[i].prompt == rs.observations[i].prompt);
    }
}

TEST_CASE("random search traces like a BO run") {
    const PromptSpace space(2, 6);
    auto objective = make_lookup_objective(space, 4);
    testing::CollectingSink sink;
    const auto r = random_search(objective, space, config(1, 3, 9), {nullptr, &sink});
    REQUIRE(sink.observations.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(sink.observations[i].iteration == i);
        CHECK(sink.observations[i].point == encode(space, sink.observations[i].prompt));
        CHECK(sink.best_seen[i] == r.best_seen[i]);
        if (i > 0) CHECK(r.best_seen[i] >= r.best_seen[i - 1]);
    }
}

TEST_CASE("random search aborts with the partial run") {
    const PromptSpace space(2, 6);
    testing::FailingObjective objective(space, 4);
    CHECK_THROWS_AS(random_search(objective, space, config(1, 3, 9)), RunAborted);
}

TEST_CASE("budget 64 on 16 prompts usually finds the optimum") {
    // 1 - (15/16)^64
    constexpr double kCoverage = 0.98392460364904737;
    const PromptSpace space(2, 4);
    int found = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto objective = make_lookup_objective(space, 1000 + seed);
        const auto r = random_search(objective, space, config(seed, 1, 63));
        found += r.best_seen.back() == objective.optimum_value();
    }
    CHECK(found >= 95);
    CHECK(kCoverage > 0.95);
}
