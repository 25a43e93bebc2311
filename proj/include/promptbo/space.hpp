#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

namespace promptbo {

using TokenIndex = std::uint32_t;
using Rng = std::mt19937_64;

/// The L-dimensional discrete search domain: every dimension ranges over
/// the same vocabulary indices {0, ..., vocab_size - 1}.
class PromptSpace {
  public:
    PromptSpace(std::size_t length, std::size_t vocab_size);

    std::size_t length() const noexcept { return length_; }
    std::size_t vocab_size() const noexcept { return vocab_size_; }
    TokenIndex max_index() const noexcept { return static_cast<TokenIndex>(vocab_size_ - 1); }

    bool operator==(const PromptSpace&) const = default;

  private:
    std::size_t length_;
    std::size_t vocab_size_;
};

/// A sequence of vocabulary indices. Validity against a space is checked by
/// the operations that take both.
class DiscretePrompt {
  public:
    DiscretePrompt() = default;
    explicit DiscretePrompt(std::vector<TokenIndex> indices) : indices_(std::move(indices)) {}

    const std::vector<TokenIndex>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    TokenIndex operator[](std::size_t i) const { return indices_[i]; }

    bool operator==(const DiscretePrompt&) const = default;
    auto operator<=>(const DiscretePrompt&) const = default;

  private:
    std::vector<TokenIndex> indices_;
};

/// A point of the closed unit box. The constructor rejects non-finite or
/// out-of-box coordinates, so every instance is valid.
class ContinuousPoint {
  public:
    ContinuousPoint() = default;
    explicit ContinuousPoint(Eigen::VectorXd coords);
    explicit ContinuousPoint(std::span<const double> coords);

    const Eigen::VectorXd& coords() const noexcept { return coords_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.size()); }
    double operator[](std::size_t i) const { return coords_[static_cast<Eigen::Index>(i)]; }

    bool operator==(const ContinuousPoint& other) const { return coords_ == other.coords_; }

  private:
    Eigen::VectorXd coords_;
};

// Throws SpaceError unless prompt has the space's length and in-range indices.
void validate(const PromptSpace& space, const DiscretePrompt& prompt);

/// coords[d] = indices[d] / (vocab_size - 1).
ContinuousPoint encode(const PromptSpace& space, const DiscretePrompt& prompt);

/// Nearest index per dimension, ties rounded up, clamped into range.
DiscretePrompt decode(const PromptSpace& space, const ContinuousPoint& point);

/// Same as decode() for raw coordinates. Finite values outside [0, 1] are
/// clamped; NaN or infinity is rejected.
DiscretePrompt decode(const PromptSpace& space, std::span<const double> coords);

DiscretePrompt sample_uniform(const PromptSpace& space, Rng& rng);

/// vocab_size ^ length, exactly.
boost::multiprecision::cpp_int cardinality(const PromptSpace& space);

}  // namespace promptbo
