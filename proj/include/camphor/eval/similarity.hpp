#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>

namespace camphor {

// Score in [0, 1]; symmetric; score(a, a) == 1.
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    virtual std::string id() const = 0;
    virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

// Dice coefficient over character-trigram multisets of the lower-cased strings, each
// padded with two spaces on both sides.
class TrigramSimilarity final : public SimilarityProvider {
public:
    std::string id() const override { return "trigram"; }

    double similarity(std::string_view a, std::string_view b) const override {
        if (a == b) return 1.0;
        auto ga = grams(a);
        auto gb = grams(b);
        std::size_t na = 0, nb = 0, shared = 0;
        for (const auto& [g, c] : ga) na += c;
        for (const auto& [g, c] : gb) nb += c;
        for (const auto& [g, c] : ga) {
            auto it = gb.find(g);
            if (it != gb.end()) shared += std::min(c, it->second);
        }
        if (na + nb == 0) return 1.0;
        return 2.0 * static_cast<double>(shared) / static_cast<double>(na + nb);
    }

private:
    static std::map<std::string, std::size_t> grams(std::string_view s) {
        std::string padded = "  ";
        for (char c : s) padded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        padded += "  ";
        std::map<std::string, std::size_t> out;
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i) ++out[padded.substr(i, 3)];
        return out;
    }
};

} // namespace camphor
