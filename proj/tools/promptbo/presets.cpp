#include "presets.hpp"

#include <cctype>

namespace promptbo::cli {

namespace {

std::string normalize(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (c == '-' || c == '_') {
            continue;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

const std::vector<TaskPreset>& task_presets() {
    static const std::vector<TaskPreset> presets = {
        {"MNLI", 117056, 10, "acc"}, {"QQP", 61571, 25, "F1"}, {"SST-2", 3747, 50, "acc"},
        {"MRPC", 7940, 50, "F1"},    {"QNLI", 3163, 50, "acc"}, {"RTE", 46992, 50, "acc"},
    };
    return presets;
}

const TaskPreset* find_preset(std::string_view name) {
    const std::string key = normalize(name);
    for (const auto& p : task_presets()) {
        if (normalize(p.name) == key) {
            return &p;
        }
    }
    return nullptr;
}

}  // namespace promptbo::cli
