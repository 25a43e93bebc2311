#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace promptbo {

// Value of the X-PromptBO-Proto header carried by every scoring exchange.
inline constexpr std::string_view kProtocolHeader = "X-PromptBO-Proto";
inline constexpr std::string_view kProtocolVersion = "1";

/// A class label on the wire: either an integer id or a verbalizer string.
using WireLabel = std::variant<std::int64_t, std::string>;

struct ScoreRequest {
    std::vector<std::int64_t> prompt_ids;
    std::string prompt_text;
    std::string split;

    bool operator==(const ScoreRequest&) const = default;
};

struct ScoreResponse {
    double score = 0.0;
    std::int64_t n_examples = 1;
    std::optional<std::vector<WireLabel>> predictions;
    std::optional<std::vector<WireLabel>> labels;

    bool operator==(const ScoreResponse&) const = default;
};

// Compact JSON with keys in schema order. parse(serialize(x)) == x and, for
// canonical input, serialize(parse(s)) == s byte for byte.
std::string serialize(const ScoreRequest& request);
std::string serialize(const ScoreResponse& response);

/// Strict parsers: unknown keys, missing keys, wrong types, non-finite
/// scores and inconsistent prediction/label lengths raise SchemaError.
ScoreRequest parse_score_request(std::string_view body);
ScoreResponse parse_score_response(std::string_view body);

}  // namespace promptbo
