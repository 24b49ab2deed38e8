#pragma once

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/retrieval/retriever.hpp"
#include "camphor/runtime/trajectory.hpp"

namespace camphor {

// One retrieval problem: a query and the tools its gold trajectory used for one agent.
struct RecallQuery {
    std::string query_id;
    std::string query;
    AgentKind agent = AgentKind::TaskCompletion;
    std::set<std::string> gold;
};

// Gold tools for an agent: the final plan for TaskCompletion, every call the agent
// made otherwise.
inline RecallQuery recall_query_of(const Trajectory& t, AgentKind agent) {
    RecallQuery q{t.query_id, t.query, agent, {}};
    if (agent == AgentKind::TaskCompletion) {
        for (const auto& c : t.final_plan) q.gold.insert(c.name);
        return q;
    }
    for (const auto& s : t.steps) {
        if (s.agent != agent) continue;
        for (const auto& c : s.calls) q.gold.insert(c.name);
    }
    return q;
}

inline std::vector<RecallQuery> recall_queries(const std::vector<Trajectory>& data, AgentKind agent) {
    std::vector<RecallQuery> out;
    out.reserve(data.size());
    for (const auto& t : data) out.push_back(recall_query_of(t, agent));
    return out;
}

// Line format of stand-alone recall sets: {"query_id", "query", "agent", "gold": [names]}.
inline nlohmann::ordered_json recall_query_to_json(const RecallQuery& q) {
    return {{"query_id", q.query_id}, {"query", q.query}, {"agent", to_id(q.agent)}, {"gold", q.gold}};
}

inline RecallQuery recall_query_from_json(const nlohmann::ordered_json& j) {
    RecallQuery q;
    q.query_id = j.at("query_id").get<std::string>();
    q.query = j.at("query").get<std::string>();
    auto agent = agent_from_id(j.value("agent", "TaskCompletion"));
    if (!agent) throw Error("unknown agent in recall query " + q.query_id);
    q.agent = *agent;
    for (const auto& g : j.at("gold")) q.gold.insert(g.get<std::string>());
    return q;
}

// |gold ∩ retrieved| / |gold| over tool names.
inline double query_recall(const std::set<std::string>& gold, const std::vector<std::string>& retrieved) {
    if (gold.empty()) return 0.0;
    std::set<std::string> hits;
    for (const auto& name : retrieved) {
        if (gold.count(name)) hits.insert(name);
    }
    return static_cast<double>(hits.size()) / static_cast<double>(gold.size());
}

struct RecallPoint {
    std::size_t k = 0;
    double recall = 0.0;
};

struct RecallCurve {
    AgentKind agent = AgentKind::TaskCompletion;
    std::string retriever;
    std::vector<RecallPoint> points;
    std::size_t query_count = 0;   // queries that contributed
    std::size_t skipped_empty = 0; // queries without gold tools for the agent
};

// Recall at every K in 1..|candidates|, macro-averaged over queries. Each query is
// ranked once and the curve read off the prefix counts.
inline RecallCurve recall_curve(const std::vector<RecallQuery>& queries, const std::vector<ToolDefinition>& candidates,
                                const Retriever& retriever, AgentKind agent) {
    RecallCurve curve;
    curve.agent = agent;
    curve.retriever = retriever.id();
    const std::size_t n = candidates.size();
    std::vector<double> sums(n, 0.0);
    for (const auto& q : queries) {
        if (q.gold.empty()) {
            ++curve.skipped_empty;
            continue;
        }
        ++curve.query_count;
        auto ranked = retriever.rank(q.query, candidates);
        std::size_t hits = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (q.gold.count(ranked[k].tool.name)) ++hits;
            sums[k] += static_cast<double>(hits) / static_cast<double>(q.gold.size());
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        double r = curve.query_count ? sums[k] / static_cast<double>(curve.query_count) : 0.0;
        curve.points.push_back({k + 1, r});
    }
    return curve;
}

// Single point: mean over queries of recall of the top K.
inline RecallPoint recall_at_k(const std::vector<RecallQuery>& queries, const std::vector<ToolDefinition>& candidates, std::size_t k,
                               const Retriever& retriever, std::size_t* skipped_empty = nullptr) {
    double sum = 0.0;
    std::size_t used = 0, skipped = 0;
    for (const auto& q : queries) {
        if (q.gold.empty()) {
            ++skipped;
            continue;
        }
        std::vector<std::string> names;
        for (const auto& t : retrieve_topk(q.query, candidates, k, retriever)) names.push_back(t.name);
        sum += query_recall(q.gold, names);
        ++used;
    }
    if (skipped_empty) *skipped_empty = skipped;
    return {k, used ? sum / static_cast<double>(used) : 0.0};
}

inline bool is_monotone(const RecallCurve& c) {
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        if (c.points[i].recall < c.points[i - 1].recall) return false;
    }
    return true;
}

inline nlohmann::ordered_json recall_curve_to_json(const RecallCurve& c) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const auto& p : c.points) points.push_back({{"k", p.k}, {"recall", p.recall}});
    return {{"agent", to_id(c.agent)},
            {"retriever", c.retriever},
            {"query_count", c.query_count},
            {"skipped_empty_gold", c.skipped_empty},
            {"points", points}};
}

// Plot-ready "K\trecall" rows.
inline std::string recall_table(const RecallCurve& c) {
    std::string out = "# " + std::string(to_id(c.agent)) + " (" + c.retriever + ", " + std::to_string(c.query_count) + " queries)\nK\trecall\n";
    char buf[64];
    for (const auto& p : c.points) {
        std::snprintf(buf, sizeof buf, "%zu\t%.6f\n", p.k, p.recall);
        out += buf;
    }
    return out;
}

} // namespace camphor
