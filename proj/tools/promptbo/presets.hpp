#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace promptbo::cli {

struct TaskPreset {
    std::string name;
    std::size_t vocab_size;
    std::size_t prompt_length;
    std::string metric;  // "acc" or "F1"
};

// GLUE tasks with their candidate vocabulary size and prompt length.
const std::vector<TaskPreset>& task_presets();

// Case-insensitive; '-' and '_' are ignored, so "SST-2", "sst2" and "sst_2"
// all match. Returns nullptr for unknown names.
const TaskPreset* find_preset(std::string_view name);

}  // namespace promptbo::cli
