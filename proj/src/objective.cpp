#include "promptbo/objective.hpp"

#include <cmath>
#include <random>
#include <thread>

#include <httplib.h>

#include "promptbo/error.hpp"

namespace promptbo {

LookupObjective::LookupObjective(const PromptSpace& space, std::uint64_t seed) : space_(space) {
    if (cardinality(space) > kMaxTableSize) {
        throw SpaceError("lookup objective needs at most " + std::to_string(kMaxTableSize) + " prompts, space has " +
                         cardinality(space).str());
    }
    const auto size = static_cast<std::size_t>(cardinality(space));
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    table_.resize(size);
    std::size_t best = 0;
    for (std::size_t i = 0; i < size; ++i) {
        table_[i] = unit(rng);
        if (table_[i] > table_[best]) {
            best = i;
        }
    }
    std::vector<TokenIndex> indices(space.length());
    std::size_t rest = best;
    for (std::size_t d = space.length(); d-- > 0;) {
        indices[d] = static_cast<TokenIndex>(rest % space.vocab_size());
        rest /= space.vocab_size();
    }
    optimum_prompt_ = DiscretePrompt(std::move(indices));
    optimum_value_ = table_[best];
}

std::size_t LookupObjective::table_index(const DiscretePrompt& prompt) const {
    validate(space_, prompt);
    std::size_t index = 0;
    for (const TokenIndex i : prompt.indices()) {
        index = index * space_.vocab_size() + i;
    }
    return index;
}

double LookupObjective::evaluate(const DiscretePrompt& prompt) { return table_[table_index(prompt)]; }

LookupObjective make_lookup_objective(const PromptSpace& space, std::uint64_t seed) {
    return LookupObjective(space, seed);
}

double CachingObjective::evaluate(const DiscretePrompt& prompt) {
    if (const auto it = cache_.find(prompt); it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    const double score = inner_->evaluate(prompt);
    cache_.emplace(prompt, score);
    return score;
}

struct RemoteScorer::Client {
    httplib::Client http;
    std::string path;
};

namespace {

// Splits "scheme://host[:port][/prefix]" into the origin and the /score path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("scorer URL must start with http:// or https://, got \"" + endpoint + "\"");
    }
    const std::string scheme = endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("unsupported scorer URL scheme \"" + scheme + "\"");
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    std::string origin = endpoint.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    if (origin.size() == scheme_end + 3) {
        throw ConfigError("scorer URL has no host: \"" + endpoint + "\"");
    }
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {origin, prefix + "/score"};
}

}  // namespace

RemoteScorer::RemoteScorer(PromptSpace space, std::shared_ptr<const Vocabulary> vocab, const std::string& endpoint,
                           RemoteScorerOptions options)
    : space_(space), vocab_(std::move(vocab)), options_(std::move(options)) {
    if (!vocab_) {
        throw ConfigError("remote scorer needs a vocabulary to render prompt text");
    }
    if (vocab_->size() != space_.vocab_size()) {
        throw ConfigError("vocabulary has " + std::to_string(vocab_->size()) + " entries but the space expects " +
                          std::to_string(space_.vocab_size()));
    }
    if (options_.retries < 0) {
        throw ConfigError("retries must be non-negative");
    }
    if (options_.split.empty()) {
        throw ConfigError("split must be non-empty");
    }
    auto [origin, path] = split_endpoint(endpoint);
    client_ = std::make_unique<Client>(Client{httplib::Client(origin), std::move(path)});
    if (!client_->http.is_valid()) {
        throw ConfigError("cannot create HTTP client for " + endpoint);
    }
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client_->http.set_connection_timeout(secs.count(), usecs.count());
    client_->http.set_read_timeout(secs.count(), usecs.count());
    client_->http.set_write_timeout(secs.count(), usecs.count());
}

RemoteScorer::~RemoteScorer() = default;

double RemoteScorer::evaluate(const DiscretePrompt& prompt) {
    validate(space_, prompt);
    ScoreRequest request;
    request.prompt_ids.assign(prompt.indices().begin(), prompt.indices().end());
    request.prompt_text = render_prompt(*vocab_, prompt);
    request.split = options_.split;
    const std::string body = serialize(request);
    const httplib::Headers headers = {{std::string(kProtocolHeader), std::string(kProtocolVersion)}};

    std::string failure;
    auto backoff = options_.initial_backoff;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        last_attempts_ = attempt + 1;
        if (options_.log) {
            options_.log("POST " + client_->path + " attempt " + std::to_string(attempt + 1) + " " + body);
        }
        const httplib::Result result = client_->http.Post(client_->path, headers, body, "application/json");
        if (!result) {
            failure = httplib::to_string(result.error());
            if (options_.log) {
                options_.log("transport failure: " + failure);
            }
            if (attempt < options_.retries) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
            continue;
        }
        if (options_.log) {
            options_.log("HTTP " + std::to_string(result->status) + " " + result->body);
        }
        if (result->status < 200 || result->status >= 300) {
            throw EvaluationError("scorer returned HTTP " + std::to_string(result->status) + ": " + result->body);
        }
        if (result->has_header(std::string(kProtocolHeader)) &&
            result->get_header_value(std::string(kProtocolHeader)) != kProtocolVersion) {
            throw SchemaError("scorer speaks protocol version " +
                              result->get_header_value(std::string(kProtocolHeader)) + ", expected " +
                              std::string(kProtocolVersion));
        }
        last_response_ = parse_score_response(result->body);
        return last_response_.score;
    }
    throw TransportError("scorer unreachable after " + std::to_string(last_attempts_) + " attempts: " + failure);
}

std::unique_ptr<RemoteScorer> remote_scorer(PromptSpace space, std::shared_ptr<const Vocabulary> vocab,
                                            const std::string& endpoint, RemoteScorerOptions options) {
    return std::make_unique<RemoteScorer>(space, std::move(vocab), endpoint, std::move(options));
}

}  // namespace promptbo
