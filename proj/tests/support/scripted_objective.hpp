#pragma once

#include <limits>
#include <vector>

#include "promptbo/error.hpp"
#include "promptbo/objective.hpp"

namespace testing {

// Lookup scores that fail after a fixed number of calls.
class FailingObjective final : public promptbo::Objective {
  public:
    enum class Failure { Throw, NaN };

    FailingObjective(const promptbo::PromptSpace& space, std::size_t succeed, Failure how = Failure::Throw)
        : inner_(space, 1), succeed_(succeed), how_(how) {}

    const promptbo::PromptSpace& space() const override { return inner_.space(); }
    double evaluate(const promptbo::DiscretePrompt& prompt) override {
        if (calls_++ >= succeed_) {
            if (how_ == Failure::Throw) throw promptbo::TransportError("connection refused");
            return std::numeric_limits<double>::quiet_NaN();
        }
        return inner_.evaluate(prompt);
    }

  private:
    promptbo::LookupObjective inner_;
    std::size_t succeed_;
    Failure how_;
    std::size_t calls_ = 0;
};

// Records every observation it receives.
class CollectingSink final : public promptbo::ObservationSink {
  public:
    void record(const promptbo::Observation& o, double best) override {
        observations.push_back(o);
        best_seen.push_back(best);
    }
    std::vector<promptbo::Observation> observations;
    std::vector<double> best_seen;
};

}  // namespace testing
