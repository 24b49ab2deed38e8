#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "camphor/device/timestamp.hpp"
#include "camphor/eval/similarity.hpp"
#include "camphor/tools/catalog.hpp"
#include "camphor/tools/function_call.hpp"

namespace camphor {

inline constexpr double kLenientThreshold = 0.7;

enum class MatchLevel { Tool = 0, Delex = 1, Full = 2 };

inline std::string_view to_id(MatchLevel l) {
    switch (l) {
        case MatchLevel::Tool: return "tool";
        case MatchLevel::Delex: return "delex";
        case MatchLevel::Full: return "full";
    }
    return "";
}

// What a comparison needs besides the two plans. Without a catalog every gold
// parameter counts as required and every value is open-string.
struct MatchContext {
    const ToolCatalog* catalog = nullptr;
    const SimilarityProvider* provider = nullptr; // trigram when unset
    double threshold = kLenientThreshold;
};

namespace detail {

inline const SimilarityProvider& provider_of(const MatchContext& ctx) {
    static const TrigramSimilarity fallback;
    return ctx.provider ? *ctx.provider : fallback;
}

inline bool exact_value_equal(const Value& a, const Value& b, DomainKind kind) {
    if (kind == DomainKind::Number) {
        auto as_number = [](const Value& v) -> std::optional<double> {
            if (is_number(v)) return std::get<double>(v);
            const auto& s = std::get<std::string>(v);
            double out = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
            return out;
        };
        auto x = as_number(a), y = as_number(b);
        if (x && y) return *x == *y;
    }
    if (kind == DomainKind::Timestamp) {
        auto x = parse_timestamp(value_text(a)), y = parse_timestamp(value_text(b));
        if (x && y) return *x == *y;
    }
    return value_text(a) == value_text(b);
}

} // namespace detail

inline bool tool_match(const FunctionCall& pred, const FunctionCall& gold) { return pred.name == gold.name; }

// Same function; no parameter outside gold's (no hallucinated parameters); every
// required gold parameter present. Parameter order is irrelevant.
inline bool delex_match(const FunctionCall& pred, const FunctionCall& gold, const MatchContext& ctx = {}) {
    if (pred.name != gold.name) return false;
    for (const auto& a : pred.args) {
        if (!gold.has(a.name)) return false;
    }
    const ToolDefinition* tool = ctx.catalog ? ctx.catalog->find(gold.name) : nullptr;
    for (const auto& g : gold.args) {
        bool required = true;
        if (tool) {
            const ParamSpec* spec = tool->find_param(g.name);
            required = !spec || spec->required;
        }
        if (required && !pred.has(g.name)) return false;
    }
    return true;
}

// Delex match plus value agreement on every shared parameter: exact for enum, number
// and timestamp domains; similarity above the threshold for open strings.
inline bool full_match(const FunctionCall& pred, const FunctionCall& gold, const MatchContext& ctx = {}) {
    if (!delex_match(pred, gold, ctx)) return false;
    const ToolDefinition* tool = ctx.catalog ? ctx.catalog->find(gold.name) : nullptr;
    for (const auto& a : pred.args) {
        const Value* g = gold.find(a.name);
        DomainKind kind = DomainKind::OpenString;
        if (tool) {
            if (const ParamSpec* spec = tool->find_param(a.name)) kind = spec->domain.kind;
        }
        bool ok = false;
        switch (kind) {
            case DomainKind::Enum:
            case DomainKind::Number:
            case DomainKind::Timestamp:
                ok = detail::exact_value_equal(a.value, *g, kind);
                break;
            case DomainKind::OpenString:
            case DomainKind::TimeRange:
                ok = detail::provider_of(ctx).similarity(value_text(a.value), value_text(*g)) > ctx.threshold;
                break;
        }
        if (!ok) return false;
    }
    return true;
}

inline bool level_match(MatchLevel level, const FunctionCall& pred, const FunctionCall& gold, const MatchContext& ctx) {
    switch (level) {
        case MatchLevel::Tool: return tool_match(pred, gold);
        case MatchLevel::Delex: return delex_match(pred, gold, ctx);
        case MatchLevel::Full: return full_match(pred, gold, ctx);
    }
    return false;
}

// F1 from a match count. Both plans empty scores 1; otherwise no match scores 0.
inline double f1_score(std::size_t matched, std::size_t pred_size, std::size_t gold_size) {
    if (pred_size == 0 && gold_size == 0) return 1.0;
    if (matched == 0) return 0.0;
    // 2pr / (p + r) reduced to one division, so the result is correctly rounded.
    return static_cast<double>(2 * matched) / static_cast<double>(pred_size + gold_size);
}

// Maximum one-to-one matching between pred (rows) and gold (columns) by augmenting
// paths. Returns gold index per pred index, or -1.
inline std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adjacency, std::size_t gold_size) {
    const std::size_t n = adjacency.size();
    std::vector<int> pred_of_gold(gold_size, -1);
    std::vector<int> gold_of_pred(n, -1);
    std::vector<char> visited;
    std::function<bool(std::size_t)> augment = [&](std::size_t p) {
        for (int g : adjacency[p]) {
            if (visited[g]) continue;
            visited[g] = 1;
            if (pred_of_gold[g] < 0 || augment(static_cast<std::size_t>(pred_of_gold[g]))) {
                pred_of_gold[g] = static_cast<int>(p);
                gold_of_pred[p] = g;
                return true;
            }
        }
        return false;
    };
    for (std::size_t p = 0; p < n; ++p) {
        visited.assign(gold_size, 0);
        augment(p);
    }
    return gold_of_pred;
}

inline std::size_t match_count(MatchLevel level, const std::vector<FunctionCall>& gold, const std::vector<FunctionCall>& pred,
                               const MatchContext& ctx) {
    std::vector<std::vector<int>> adj(pred.size());
    for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (level_match(level, pred[p], gold[g], ctx)) adj[p].push_back(static_cast<int>(g));
        }
    }
    auto m = max_bipartite_matching(adj, gold.size());
    return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](int g) { return g >= 0; }));
}

// F1 over function-name multisets.
inline double tool_f1(const std::vector<FunctionCall>& gold, const std::vector<FunctionCall>& pred) {
    return f1_score(match_count(MatchLevel::Tool, gold, pred, {}), pred.size(), gold.size());
}

inline double delex_f1(const std::vector<FunctionCall>& gold, const std::vector<FunctionCall>& pred, const MatchContext& ctx = {}) {
    return f1_score(match_count(MatchLevel::Delex, gold, pred, ctx), pred.size(), gold.size());
}

inline double plan_f1(const std::vector<FunctionCall>& gold, const std::vector<FunctionCall>& pred, const MatchContext& ctx = {}) {
    return f1_score(match_count(MatchLevel::Full, gold, pred, ctx), pred.size(), gold.size());
}

struct MatchedPair {
    std::size_t pred = 0;
    std::size_t gold = 0;
    MatchLevel level = MatchLevel::Tool; // strongest level this pair satisfies
};

// Gold against predicted plan at all three levels, with an explanation matching.
struct PlanComparison {
    std::vector<FunctionCall> gold;
    std::vector<FunctionCall> pred;
    std::vector<MatchedPair> matching;
    std::vector<std::size_t> unmatched_pred;
    std::vector<std::size_t> unmatched_gold;
    std::size_t tool_matches = 0;
    std::size_t delex_matches = 0;
    std::size_t full_matches = 0;

    double tool_f1() const { return f1_score(tool_matches, pred.size(), gold.size()); }
    double delex_f1() const { return f1_score(delex_matches, pred.size(), gold.size()); }
    double plan_f1() const { return f1_score(full_matches, pred.size(), gold.size()); }
};

inline PlanComparison compare_plans(const std::vector<FunctionCall>& gold, const std::vector<FunctionCall>& pred, const MatchContext& ctx = {}) {
    PlanComparison c;
    c.gold = gold;
    c.pred = pred;
    c.tool_matches = match_count(MatchLevel::Tool, gold, pred, ctx);
    c.delex_matches = match_count(MatchLevel::Delex, gold, pred, ctx);
    c.full_matches = match_count(MatchLevel::Full, gold, pred, ctx);

    // Explanation: a maximum name matching that tries stronger partners first.
    std::vector<std::vector<int>> adj(pred.size());
    std::vector<std::vector<MatchLevel>> levels(pred.size(), std::vector<MatchLevel>(gold.size(), MatchLevel::Tool));
    for (std::size_t p = 0; p < pred.size(); ++p) {
        std::vector<std::pair<int, int>> ranked;
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (!tool_match(pred[p], gold[g])) continue;
            MatchLevel l = full_match(pred[p], gold[g], ctx) ? MatchLevel::Full
                           : delex_match(pred[p], gold[g], ctx) ? MatchLevel::Delex
                                                                : MatchLevel::Tool;
            levels[p][g] = l;
            ranked.emplace_back(-static_cast<int>(l), static_cast<int>(g));
        }
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [neg, g] : ranked) adj[p].push_back(g);
    }
    auto m = max_bipartite_matching(adj, gold.size());
    std::vector<char> gold_used(gold.size(), 0);
    for (std::size_t p = 0; p < pred.size(); ++p) {
        if (m[p] < 0) {
            c.unmatched_pred.push_back(p);
            continue;
        }
        auto g = static_cast<std::size_t>(m[p]);
        gold_used[g] = 1;
        c.matching.push_back({p, g, levels[p][g]});
    }
    for (std::size_t g = 0; g < gold.size(); ++g) {
        if (!gold_used[g]) c.unmatched_gold.push_back(g);
    }
    return c;
}

} // namespace camphor
