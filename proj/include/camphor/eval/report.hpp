#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/error.hpp"
#include "camphor/eval/metrics.hpp"
#include "camphor/runtime/trajectory.hpp"

namespace camphor {

class QueryIdMismatch : public Error {
public:
    QueryIdMismatch(std::vector<std::string> missing_pred, std::vector<std::string> extra_pred)
        : Error(describe(missing_pred, extra_pred)), missing_(std::move(missing_pred)), extra_(std::move(extra_pred)) {}

    const std::vector<std::string>& missing_from_pred() const noexcept { return missing_; }
    const std::vector<std::string>& not_in_gold() const noexcept { return extra_; }

private:
    static std::string describe(const std::vector<std::string>& missing, const std::vector<std::string>& extra) {
        std::string msg = "query ids differ between gold and predictions";
        auto list = [&msg](const char* what, const std::vector<std::string>& ids) {
            if (ids.empty()) return;
            msg += std::string("\n  ") + what + ":";
            for (const auto& id : ids) msg += " " + id;
        };
        list("gold only", missing);
        list("prediction only", extra);
        return msg;
    }

    std::vector<std::string> missing_;
    std::vector<std::string> extra_;
};

enum class Averaging { Macro, Micro };

inline std::string_view to_id(Averaging a) { return a == Averaging::Macro ? "macro" : "micro"; }

inline Averaging averaging_from_id(std::string_view s) {
    if (s == "macro") return Averaging::Macro;
    if (s == "micro") return Averaging::Micro;
    throw ConfigError("unknown averaging '" + std::string(s) + "' (macro | micro)");
}

struct MetricTriple {
    double tool_f1 = 0.0;
    double delex_f1 = 0.0;
    double plan_f1 = 0.0;

    friend bool operator==(const MetricTriple&, const MetricTriple&) = default;
};

struct QueryScore {
    std::string query_id;
    MetricTriple scores;
    PlanComparison comparison;
};

struct EvalReport {
    std::vector<QueryScore> per_query; // ordered by query id
    MetricTriple corpus;
    Averaging averaging = Averaging::Macro;
    std::string provider;
    double threshold = kLenientThreshold;
};

// Scores predicted final plans against gold, query by query. Both sides must hold
// the same query ids.
inline EvalReport evaluate(const std::vector<Trajectory>& gold, const std::vector<Trajectory>& pred, const MatchContext& ctx = {},
                           Averaging averaging = Averaging::Macro) {
    std::map<std::string, const Trajectory*> g, p;
    for (const auto& t : gold) {
        if (!g.emplace(t.query_id, &t).second) throw Error("duplicate gold query id " + t.query_id);
    }
    for (const auto& t : pred) {
        if (!p.emplace(t.query_id, &t).second) throw Error("duplicate predicted query id " + t.query_id);
    }
    std::vector<std::string> missing, extra;
    for (const auto& [id, t] : g) {
        if (!p.count(id)) missing.push_back(id);
    }
    for (const auto& [id, t] : p) {
        if (!g.count(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) throw QueryIdMismatch(missing, extra);

    EvalReport r;
    r.averaging = averaging;
    r.provider = detail::provider_of(ctx).id();
    r.threshold = ctx.threshold;
    std::size_t tool_m = 0, delex_m = 0, full_m = 0, pred_n = 0, gold_n = 0;
    for (const auto& [id, gt] : g) {
        auto cmp = compare_plans(gt->final_plan, p.at(id)->final_plan, ctx);
        MetricTriple s{cmp.tool_f1(), cmp.delex_f1(), cmp.plan_f1()};
        tool_m += cmp.tool_matches;
        delex_m += cmp.delex_matches;
        full_m += cmp.full_matches;
        pred_n += cmp.pred.size();
        gold_n += cmp.gold.size();
        r.per_query.push_back({id, s, std::move(cmp)});
    }
    if (averaging == Averaging::Micro) {
        r.corpus = {f1_score(tool_m, pred_n, gold_n), f1_score(delex_m, pred_n, gold_n), f1_score(full_m, pred_n, gold_n)};
    } else if (!r.per_query.empty()) {
        for (const auto& q : r.per_query) {
            r.corpus.tool_f1 += q.scores.tool_f1;
            r.corpus.delex_f1 += q.scores.delex_f1;
            r.corpus.plan_f1 += q.scores.plan_f1;
        }
        double n = static_cast<double>(r.per_query.size());
        r.corpus.tool_f1 /= n;
        r.corpus.delex_f1 /= n;
        r.corpus.plan_f1 /= n;
    }
    return r;
}

inline std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
    return buf;
}

inline nlohmann::ordered_json eval_report_to_json(const EvalReport& r) {
    nlohmann::ordered_json queries = nlohmann::ordered_json::array();
    for (const auto& q : r.per_query) {
        nlohmann::ordered_json matching = nlohmann::ordered_json::array();
        for (const auto& m : q.comparison.matching) matching.push_back({{"pred", m.pred}, {"gold", m.gold}, {"level", to_id(m.level)}});
        queries.push_back({{"query_id", q.query_id},
                           {"tool_f1", q.scores.tool_f1},
                           {"delex_f1", q.scores.delex_f1},
                           {"plan_f1", q.scores.plan_f1},
                           {"gold", call_names(q.comparison.gold)},
                           {"pred", call_names(q.comparison.pred)},
                           {"matching", matching},
                           {"unmatched_pred", q.comparison.unmatched_pred},
                           {"unmatched_gold", q.comparison.unmatched_gold}});
    }
    return {{"format_version", kFormatVersion},
            {"averaging", to_id(r.averaging)},
            {"similarity", r.provider},
            {"threshold", r.threshold},
            {"query_count", r.per_query.size()},
            {"corpus",
             {{"tool_f1", r.corpus.tool_f1},
              {"delex_f1", r.corpus.delex_f1},
              {"plan_f1", r.corpus.plan_f1},
              {"tool_f1_pct", percent(r.corpus.tool_f1)},
              {"delex_f1_pct", percent(r.corpus.delex_f1)},
              {"plan_f1_pct", percent(r.corpus.plan_f1)}}},
            {"queries", queries}};
}

inline std::string eval_table(const EvalReport& r) {
    std::string out;
    auto row = [&out](const char* name, double v) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-28s%8s\n", name, percent(v).c_str());
        out += buf;
    };
    row("Tool F1 / %", r.corpus.tool_f1);
    row("Delexicalized Plan F1 / %", r.corpus.delex_f1);
    row("Plan F1 / %", r.corpus.plan_f1);
    return out;
}

} // namespace camphor
