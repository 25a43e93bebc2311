#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "promptbo/protocol.hpp"
#include "promptbo/space.hpp"
#include "promptbo/vocab.hpp"

namespace promptbo {

/// A black-box score over prompts, higher is better. Implementations throw
/// EvaluationError (or a subclass) instead of returning non-finite values.
class Objective {
  public:
    virtual ~Objective() = default;
    virtual const PromptSpace& space() const = 0;
    virtual double evaluate(const DiscretePrompt& prompt) = 0;
};

/// Exhaustive table of i.i.d. uniform [0, 1) scores over every prompt of a
/// small space. Used as a verification oracle with a known optimum.
class LookupObjective final : public Objective {
  public:
    static constexpr std::size_t kMaxTableSize = 1'000'000;

    // Throws SpaceError when vocab_size^length exceeds kMaxTableSize.
    LookupObjective(const PromptSpace& space, std::uint64_t seed);

    const PromptSpace& space() const override { return space_; }
    double evaluate(const DiscretePrompt& prompt) override;

    std::size_t table_size() const noexcept { return table_.size(); }
    const std::vector<double>& table() const noexcept { return table_; }
    const DiscretePrompt& optimum_prompt() const noexcept { return optimum_prompt_; }
    double optimum_value() const noexcept { return optimum_value_; }

    // Mixed-radix position of a prompt, first index most significant.
    std::size_t table_index(const DiscretePrompt& prompt) const;

  private:
    PromptSpace space_;
    std::vector<double> table_;
    DiscretePrompt optimum_prompt_;
    double optimum_value_ = 0.0;
};

LookupObjective make_lookup_objective(const PromptSpace& space, std::uint64_t seed);

/// Memoises another objective by prompt.
class CachingObjective final : public Objective {
  public:
    explicit CachingObjective(std::unique_ptr<Objective> inner) : inner_(std::move(inner)) {}

    const PromptSpace& space() const override { return inner_->space(); }
    double evaluate(const DiscretePrompt& prompt) override;
    std::size_t hits() const noexcept { return hits_; }

  private:
    std::unique_ptr<Objective> inner_;
    std::map<DiscretePrompt, double> cache_;
    std::size_t hits_ = 0;
};

struct RemoteScorerOptions {
    std::chrono::milliseconds timeout{30'000};
    // Extra attempts after a transport failure.
    int retries = 2;
    std::chrono::milliseconds initial_backoff{500};
    std::string split = "dev";
    // Receives one line per request and per response.
    std::function<void(const std::string&)> log;
};

/// Scores prompts by POSTing a ScoreRequest to {endpoint}/score. Transport
/// failures are retried with exponential backoff; HTTP status >= 400 and
/// schema violations fail immediately.
class RemoteScorer final : public Objective {
  public:
    RemoteScorer(PromptSpace space, std::shared_ptr<const Vocabulary> vocab, const std::string& endpoint,
                 RemoteScorerOptions options = {});
    ~RemoteScorer() override;

    const PromptSpace& space() const override { return space_; }
    double evaluate(const DiscretePrompt& prompt) override;

    // Full response of the last successful request.
    const ScoreResponse& last_response() const noexcept { return last_response_; }
    // Attempts made by the last evaluate() call.
    int last_attempts() const noexcept { return last_attempts_; }

  private:
    struct Client;

    PromptSpace space_;
    std::shared_ptr<const Vocabulary> vocab_;
    RemoteScorerOptions options_;
    std::unique_ptr<Client> client_;
    ScoreResponse last_response_;
    int last_attempts_ = 0;
};

std::unique_ptr<RemoteScorer> remote_scorer(PromptSpace space, std::shared_ptr<const Vocabulary> vocab,
                                            const std::string& endpoint, RemoteScorerOptions options = {});

}  // namespace promptbo
