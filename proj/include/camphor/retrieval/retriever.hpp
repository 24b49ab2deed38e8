#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "camphor/error.hpp"
#include "camphor/tools/catalog.hpp"

namespace camphor {

struct ScoredTool {
    ToolDefinition tool;
    double score = 0.0;
};

class KOutOfRange : public Error {
public:
    using Error::Error;
};

// Ranks candidate tools for a query. Implementations return finite scores; ranking
// is by descending score with ties broken by tool name.
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::string id() const = 0;
    virtual std::vector<double> score(std::string_view query, const std::vector<ToolDefinition>& candidates) const = 0;

    std::vector<ScoredTool> rank(std::string_view query, const std::vector<ToolDefinition>& candidates) const {
        auto scores = score(query, candidates);
        std::vector<ScoredTool> out;
        out.reserve(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            double s = i < scores.size() && std::isfinite(scores[i]) ? scores[i] : 0.0;
            out.push_back({candidates[i], s});
        }
        std::sort(out.begin(), out.end(), [](const ScoredTool& a, const ScoredTool& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.tool.name < b.tool.name;
        });
        return out;
    }
};

namespace detail {

inline bool is_stop_word(std::string_view w) {
    static const std::set<std::string, std::less<>> words = {
        "a", "about", "add", "all", "also", "an", "and", "any", "are", "as", "at", "be", "by", "can", "could",
        "do", "for", "from", "get", "has", "have", "i", "in", "is", "it", "its", "let", "me", "my", "of", "on",
        "or", "our", "please", "s", "show", "so", "specific", "specified", "that", "the", "their", "them", "this",
        "to", "up", "us", "user", "we", "what", "when", "which", "will", "with", "you", "your",
    };
    return words.count(w) > 0;
}

// Lower-cased alphanumeric words minus stop words; underscores split identifiers.
inline std::set<std::string> content_words(std::string_view text) {
    std::set<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !is_stop_word(cur)) out.insert(cur);
        cur.clear();
    };
    for (char c : text) {
        auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            cur.push_back(static_cast<char>(std::tolower(uc)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

} // namespace detail

// Token-overlap count between query and definition text.
class LexicalRetriever final : public Retriever {
public:
    std::string id() const override { return "lexical"; }

    std::vector<double> score(std::string_view query, const std::vector<ToolDefinition>& candidates) const override {
        auto q = detail::content_words(query);
        std::vector<double> out;
        out.reserve(candidates.size());
        for (const auto& c : candidates) {
            auto d = detail::content_words(c.definition_text());
            std::size_t n = 0;
            for (const auto& w : q) n += d.count(w);
            out.push_back(static_cast<double>(n));
        }
        return out;
    }
};

inline std::vector<ToolDefinition> retrieve_topk(std::string_view query, const std::vector<ToolDefinition>& candidates, std::size_t k,
                                                 const Retriever& retriever) {
    if (k < 1 || k > candidates.size()) {
        throw KOutOfRange("K=" + std::to_string(k) + " outside [1, " + std::to_string(candidates.size()) + "]");
    }
    auto ranked = retriever.rank(query, candidates);
    std::vector<ToolDefinition> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(std::move(ranked[i].tool));
    return out;
}

} // namespace camphor
