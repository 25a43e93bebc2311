#include "promptbo/protocol.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "promptbo/error.hpp"

namespace promptbo {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json labels_to_json(const std::vector<WireLabel>& labels) {
    ordered_json out = ordered_json::array();
    for (const WireLabel& label : labels) {
        std::visit([&](const auto& v) { out.push_back(v); }, label);
    }
    return out;
}

std::vector<WireLabel> labels_from_json(const ordered_json& j, std::string_view key) {
    if (!j.is_array()) {
        throw SchemaError(std::string(key) + " must be an array");
    }
    std::vector<WireLabel> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        if (item.is_number_integer()) {
            out.emplace_back(item.get<std::int64_t>());
        } else if (item.is_string()) {
            out.emplace_back(item.get<std::string>());
        } else {
            throw SchemaError(std::string(key) + " entries must be integers or strings");
        }
    }
    return out;
}

ordered_json parse_object(std::string_view body, const std::set<std::string>& allowed) {
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw SchemaError("message must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw SchemaError("unexpected key \"" + key + "\"");
        }
    }
    return j;
}

const ordered_json& require(const ordered_json& j, const std::string& key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError("missing key \"" + key + "\"");
    }
    return *it;
}

}  // namespace

std::string serialize(const ScoreRequest& request) {
    ordered_json j;
    j["prompt_ids"] = request.prompt_ids;
    j["prompt_text"] = request.prompt_text;
    j["split"] = request.split;
    return j.dump();
}

std::string serialize(const ScoreResponse& response) {
    ordered_json j;
    j["score"] = response.score;
    j["n_examples"] = response.n_examples;
    if (response.predictions) {
        j["predictions"] = labels_to_json(*response.predictions);
    }
    if (response.labels) {
        j["labels"] = labels_to_json(*response.labels);
    }
    return j.dump();
}

ScoreRequest parse_score_request(std::string_view body) {
    const ordered_json j = parse_object(body, {"prompt_ids", "prompt_text", "split"});
    ScoreRequest request;
    const auto& ids = require(j, "prompt_ids");
    if (!ids.is_array()) {
        throw SchemaError("prompt_ids must be an array");
    }
    for (const auto& id : ids) {
        if (!id.is_number_integer() || id.get<std::int64_t>() < 0) {
            throw SchemaError("prompt_ids entries must be non-negative integers");
        }
        request.prompt_ids.push_back(id.get<std::int64_t>());
    }
    const auto& text = require(j, "prompt_text");
    if (!text.is_string()) {
        throw SchemaError("prompt_text must be a string");
    }
    request.prompt_text = text.get<std::string>();
    const auto& split = require(j, "split");
    if (!split.is_string() || split.get<std::string>().empty()) {
        throw SchemaError("split must be a non-empty string");
    }
    request.split = split.get<std::string>();
    return request;
}

ScoreResponse parse_score_response(std::string_view body) {
    const ordered_json j = parse_object(body, {"score", "n_examples", "predictions", "labels"});
    ScoreResponse response;
    const auto& score = require(j, "score");
    if (!score.is_number() || !std::isfinite(score.get<double>())) {
        throw SchemaError("score must be a finite number");
    }
    response.score = score.get<double>();
    const auto& n = require(j, "n_examples");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 1) {
        throw SchemaError("n_examples must be a positive integer");
    }
    response.n_examples = n.get<std::int64_t>();
    if (const auto it = j.find("predictions"); it != j.end()) {
        response.predictions = labels_from_json(*it, "predictions");
    }
    if (const auto it = j.find("labels"); it != j.end()) {
        response.labels = labels_from_json(*it, "labels");
    }
    if (response.predictions && response.labels) {
        const auto expected = static_cast<std::size_t>(response.n_examples);
        if (response.predictions->size() != response.labels->size() || response.labels->size() != expected) {
            throw SchemaError("predictions and labels must both have n_examples entries");
        }
    }
    return response;
}

}  // namespace promptbo
