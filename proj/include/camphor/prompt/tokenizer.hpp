#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "camphor/error.hpp"

namespace camphor {

// Counts are tokenizer-dependent; nothing assumes sub-additivity over concatenation.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
    virtual std::size_t count(std::string_view text) const { return tokenize(text).size(); }
};

// Maximal runs of ASCII letters/digits (and UTF-8 bytes) form one token; every other
// non-whitespace character is a token of its own; whitespace only separates.
// "get_notes_content(keyword)" -> get _ notes _ content ( keyword )
class WordPunctTokenizer final : public Tokenizer {
public:
    std::string id() const override { return "wordpunct"; }

    std::vector<std::string> tokenize(std::string_view text) const override {
        std::vector<std::string> out;
        std::string word;
        auto flush = [&] {
            if (!word.empty()) {
                out.push_back(std::move(word));
                word.clear();
            }
        };
        for (char c : text) {
            auto uc = static_cast<unsigned char>(c);
            if (std::isalnum(uc) || uc >= 0x80) {
                word.push_back(c);
            } else if (std::isspace(uc)) {
                flush();
            } else {
                flush();
                out.emplace_back(1, c);
            }
        }
        flush();
        return out;
    }
};

class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string id() const override { return "whitespace"; }

    std::vector<std::string> tokenize(std::string_view text) const override {
        std::vector<std::string> out;
        std::string word;
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!word.empty()) out.push_back(std::move(word));
                word.clear();
            } else {
                word.push_back(c);
            }
        }
        if (!word.empty()) out.push_back(std::move(word));
        return out;
    }
};

inline std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
    if (name.empty() || name == "wordpunct") return std::make_unique<WordPunctTokenizer>();
    if (name == "whitespace") return std::make_unique<WhitespaceTokenizer>();
    throw ConfigError("unknown tokenizer: " + std::string(name));
}

} // namespace camphor
