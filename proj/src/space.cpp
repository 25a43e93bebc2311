#include "promptbo/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "promptbo/error.hpp"

namespace promptbo {

PromptSpace::PromptSpace(std::size_t length, std::size_t vocab_size)
    : length_(length), vocab_size_(vocab_size) {
    if (length_ < 1) {
        throw SpaceError("prompt length must be at least 1");
    }
    if (vocab_size_ < 2) {
        throw SpaceError("vocabulary size must be at least 2, got " + std::to_string(vocab_size_));
    }
    if (vocab_size_ - 1 > std::numeric_limits<TokenIndex>::max()) {
        throw SpaceError("vocabulary size " + std::to_string(vocab_size_) + " exceeds index range");
    }
}

ContinuousPoint::ContinuousPoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    for (Eigen::Index d = 0; d < coords_.size(); ++d) {
        const double c = coords_[d];
        if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
            throw SpaceError("coordinate " + std::to_string(d) + " = " + std::to_string(c) +
                             " is outside the unit interval");
        }
    }
}

ContinuousPoint::ContinuousPoint(std::span<const double> coords)
    : ContinuousPoint(Eigen::Map<const Eigen::VectorXd>(coords.data(),
                                                       static_cast<Eigen::Index>(coords.size()))) {}

void validate(const PromptSpace& space, const DiscretePrompt& prompt) {
    if (prompt.size() != space.length()) {
        throw SpaceError("prompt has length " + std::to_string(prompt.size()) + ", space expects " +
                         std::to_string(space.length()));
    }
    for (std::size_t d = 0; d < prompt.size(); ++d) {
        if (prompt[d] >= space.vocab_size()) {
            throw SpaceError("index " + std::to_string(prompt[d]) + " at position " + std::to_string(d) +
                             " is out of range for vocabulary size " + std::to_string(space.vocab_size()));
        }
    }
}

ContinuousPoint encode(const PromptSpace& space, const DiscretePrompt& prompt) {
    validate(space, prompt);
    const double divisor = static_cast<double>(space.max_index());
    Eigen::VectorXd coords(static_cast<Eigen::Index>(prompt.size()));
    for (std::size_t d = 0; d < prompt.size(); ++d) {
        coords[static_cast<Eigen::Index>(d)] = static_cast<double>(prompt[d]) / divisor;
    }
    return ContinuousPoint(std::move(coords));
}

namespace {

TokenIndex snap(double coord, TokenIndex max_index) {
    const double scaled = std::clamp(coord, 0.0, 1.0) * static_cast<double>(max_index);
    const double rounded = std::floor(scaled + 0.5);
    return static_cast<TokenIndex>(std::clamp(rounded, 0.0, static_cast<double>(max_index)));
}

}  // namespace

DiscretePrompt decode(const PromptSpace& space, std::span<const double> coords) {
    if (coords.size() != space.length()) {
        throw SpaceError("point has dimension " + std::to_string(coords.size()) + ", space expects " +
                         std::to_string(space.length()));
    }
    std::vector<TokenIndex> indices(coords.size());
    for (std::size_t d = 0; d < coords.size(); ++d) {
        if (!std::isfinite(coords[d])) {
            throw SpaceError("non-finite coordinate at position " + std::to_string(d));
        }
        indices[d] = snap(coords[d], space.max_index());
    }
    return DiscretePrompt(std::move(indices));
}

DiscretePrompt decode(const PromptSpace& space, const ContinuousPoint& point) {
    return decode(space, std::span<const double>(point.coords().data(), point.size()));
}

DiscretePrompt sample_uniform(const PromptSpace& space, Rng& rng) {
    std::uniform_int_distribution<TokenIndex> draw(0, space.max_index());
    std::vector<TokenIndex> indices(space.length());
    for (auto& index : indices) {
        index = draw(rng);
    }
    return DiscretePrompt(std::move(indices));
}

boost::multiprecision::cpp_int cardinality(const PromptSpace& space) {
    return boost::multiprecision::pow(boost::multiprecision::cpp_int(space.vocab_size()),
                                      static_cast<unsigned>(space.length()));
}

}  // namespace promptbo
