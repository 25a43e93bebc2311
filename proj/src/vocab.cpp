#include "promptbo/vocab.hpp"

#include <fstream>
#include <iterator>
#include <optional>

#include "promptbo/error.hpp"

namespace promptbo {

namespace {

// Returns the byte offset of the first malformed sequence, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + extra >= s.size()) {
            return i;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                return i;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, beyond U+10FFFF
        static constexpr std::uint32_t min_by_length[] = {0, 0x80, 0x800, 0x10000};
        if (cp < min_by_length[extra] || (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            return i;
        }
        i += extra + 1;
    }
    return std::nullopt;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> entries) : entries_(std::move(entries)) {
    if (entries_.size() < 2) {
        throw VocabError("vocabulary needs at least 2 entries, got " + std::to_string(entries_.size()));
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].empty()) {
            throw VocabError("vocabulary entry " + std::to_string(i) + " is empty");
        }
    }
}

Vocabulary parse_vocabulary(std::string_view text) {
    if (text.empty()) {
        throw VocabError("vocabulary file is empty");
    }
    if (auto bad = find_invalid_utf8(text)) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < *bad; ++i) {
            line += text[i] == '\n';
        }
        throw VocabError("invalid UTF-8 on line " + std::to_string(line));
    }
    if (text.back() == '\n') {
        text.remove_suffix(1);
    }
    std::vector<std::string> entries;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = text.find('\n', start);
        const std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
        if (line.empty()) {
            throw VocabError("empty vocabulary entry on line " + std::to_string(entries.size() + 1));
        }
        entries.emplace_back(line);
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return Vocabulary(std::move(entries));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw VocabError("cannot open vocabulary file " + path.string());
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_vocabulary(text);
    } catch (const VocabError& e) {
        throw VocabError(path.string() + ": " + e.what());
    }
}

std::string render_prompt(const Vocabulary& vocab, const DiscretePrompt& prompt) {
    std::string out;
    for (std::size_t pos = 0; pos < prompt.size(); ++pos) {
        const TokenIndex index = prompt[pos];
        if (index >= vocab.size()) {
            throw VocabError("index " + std::to_string(index) + " at position " + std::to_string(pos) +
                             " is out of range for vocabulary of size " + std::to_string(vocab.size()));
        }
        if (pos > 0) {
            out += ' ';
        }
        out += vocab[index];
    }
    return out;
}

}  // namespace promptbo
