#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "promptbo/space.hpp"

namespace promptbo {

/// Candidate prompt vocabulary. Index i is the i-th entry (one token or one
/// n-gram rendered as text). Immutable once constructed.
class Vocabulary {
  public:
    explicit Vocabulary(std::vector<std::string> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::string& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<std::string>& entries() const noexcept { return entries_; }

  private:
    std::vector<std::string> entries_;
};

/// Reads one entry per line (LF, optional trailing newline). Line k becomes
/// index k. Rejects missing or empty files, empty lines and invalid UTF-8,
/// reporting the 1-based line number.
Vocabulary load_vocabulary(const std::filesystem::path& path);

/// Parses vocabulary text already in memory; same rules as load_vocabulary.
Vocabulary parse_vocabulary(std::string_view text);

/// Entries joined with a single space, in sequence order.
std::string render_prompt(const Vocabulary& vocab, const DiscretePrompt& prompt);

}  // namespace promptbo
