#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "promptbo/error.hpp"

namespace promptbo {

namespace detail {

inline void check_lengths(std::size_t predictions, std::size_t labels) {
    if (predictions != labels) {
        throw MetricsError("got " + std::to_string(predictions) + " predictions for " + std::to_string(labels) +
                           " labels");
    }
    if (labels == 0) {
        throw MetricsError("metrics need at least one example");
    }
}

}  // namespace detail

template <class Label>
struct BinaryLabels {
    Label positive;
    Label negative;
};

// Fraction of positions where prediction == label.
template <class Label>
double accuracy(std::span<const Label> predictions, std::span<const Label> labels) {
    detail::check_lengths(predictions.size(), labels.size());
    std::size_t matches = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        matches += predictions[i] == labels[i];
    }
    return static_cast<double>(matches) / static_cast<double>(labels.size());
}

/// Binary F1 = 2PR / (P + R) for the positive class. Returns 0 when there
/// are no true positives (which covers every zero-denominator case). Labels
/// or predictions outside {positive, negative} raise MetricsError.
template <class Label>
double f1_binary(std::span<const Label> predictions, std::span<const Label> labels, const BinaryLabels<Label>& classes) {
    detail::check_lengths(predictions.size(), labels.size());
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    auto check = [&](const Label& v, const char* what, std::size_t i) {
        if (!(v == classes.positive) && !(v == classes.negative)) {
            throw MetricsError(std::string(what) + " " + std::to_string(i) + " is outside the binary label set");
        }
    };
    for (std::size_t i = 0; i < labels.size(); ++i) {
        check(predictions[i], "prediction", i);
        check(labels[i], "label", i);
        const bool predicted = predictions[i] == classes.positive;
        const bool actual = labels[i] == classes.positive;
        tp += predicted && actual;
        fp += predicted && !actual;
        fn += !predicted && actual;
    }
    if (tp == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

template <class Label>
struct LabeledPredictions {
    std::vector<Label> predictions;
    std::vector<Label> labels;
};

template <class Label>
double accuracy(const LabeledPredictions<Label>& data) {
    return accuracy<Label>(data.predictions, data.labels);
}

template <class Label>
double f1_binary(const LabeledPredictions<Label>& data, const BinaryLabels<Label>& classes) {
    return f1_binary<Label>(data.predictions, data.labels, classes);
}

}  // namespace promptbo
