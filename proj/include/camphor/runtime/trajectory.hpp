#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/device/simulator.hpp"
#include "camphor/runtime/history.hpp"
#include "camphor/tools/agent_kind.hpp"
#include "camphor/tools/call_parser.hpp"

namespace camphor {

inline constexpr int kFormatVersion = 1;

// One expert invocation: the orchestrator's choice, the expert's raw completion,
// the parsed calls and their execution results.
struct Step {
    AgentKind agent = AgentKind::TaskCompletion;
    std::string orchestrator; // high-order agent completion that selected `agent`
    std::string completion;   // expert completion, verbatim
    std::vector<FunctionCall> calls;
    std::vector<ExecutionResult> results;

    friend bool operator==(const Step&, const Step&) = default;
};

enum class EpisodeStatus { Completed, Truncated, Aborted };

inline std::string_view to_id(EpisodeStatus s) {
    switch (s) {
        case EpisodeStatus::Completed: return "completed";
        case EpisodeStatus::Truncated: return "truncated";
        case EpisodeStatus::Aborted: return "aborted";
    }
    return "";
}

struct Trajectory {
    std::string query_id;
    std::string split;
    std::string query;
    std::string device_state;
    std::vector<Step> steps;
    std::vector<FunctionCall> final_plan;
    std::string final_response;
    EpisodeStatus status = EpisodeStatus::Completed;
    std::string diagnostic;
    std::optional<MessageHistory> recorded_history; // only for imported data sets

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.query_id == b.query_id && a.split == b.split && a.query == b.query && a.device_state == b.device_state &&
               a.steps == b.steps && a.final_plan == b.final_plan && a.final_response == b.final_response &&
               a.status == b.status && a.diagnostic == b.diagnostic;
    }
};

inline void append_step_turns(MessageHistory& h, const Step& step) {
    h.append(Turn::by(AgentKind::HighOrderReasoning, step.orchestrator));
    h.append(Turn::by(step.agent, step.completion));
    // The plan ends the episode; its acknowledgements never reach another prompt.
    if (step.agent == AgentKind::TaskCompletion) return;
    for (const auto& r : step.results) h.append(Turn::result(render_result(r)));
}

// Shared message history after the first `step_count` steps.
inline MessageHistory history_of(const Trajectory& t, std::size_t step_count) {
    MessageHistory h;
    h.append(Turn::user(t.query));
    for (std::size_t i = 0; i < step_count && i < t.steps.size(); ++i) append_step_turns(h, t.steps[i]);
    return h;
}

inline MessageHistory history_of(const Trajectory& t) { return history_of(t, t.steps.size()); }

// Canonical orchestrator completion naming an agent: "[Device Information Agent]".
inline std::string agent_choice_text(AgentKind kind) { return "[" + std::string(display_name(kind)) + "]"; }

// ---------------------------------------------------------------------------
// JSON records (one per line in data-set and prediction files)
// ---------------------------------------------------------------------------

inline ExecutionResult result_from_json(const ordered_json& j) {
    ExecutionResult r;
    r.source_call = parse_call(j.at("call").get<std::string>());
    r.status = j.at("status").get<std::string>() == "ok" ? ResultStatus::Ok : ResultStatus::Error;
    if (j.contains("code")) r.error = exec_error_from_id(j["code"].get<std::string>());
    if (j.contains("text")) {
        r.is_text = true;
        r.text = j["text"].get<std::string>();
    } else {
        for (const auto& o : j.at("records")) {
            Record rec;
            rec.id = o.at("id").get<std::string>();
            rec.app = o.at("app").get<std::string>();
            if (o.contains("timestamp")) rec.timestamp = o["timestamp"].get<std::string>();
            rec.fields = o.at("fields");
            r.records.push_back(std::move(rec));
        }
    }
    return r;
}

inline ordered_json trajectory_to_json(const Trajectory& t) {
    ordered_json steps = ordered_json::array();
    for (const auto& s : t.steps) {
        ordered_json calls = ordered_json::array();
        for (const auto& c : s.calls) calls.push_back(serialize(c));
        ordered_json results = ordered_json::array();
        for (const auto& r : s.results) results.push_back(result_to_json(r));
        steps.push_back({{"agent", to_id(s.agent)},
                         {"orchestrator", s.orchestrator},
                         {"completion", s.completion},
                         {"calls", calls},
                         {"results", results}});
    }
    ordered_json plan = ordered_json::array();
    for (const auto& c : t.final_plan) plan.push_back(serialize(c));
    ordered_json j = {{"format_version", kFormatVersion},
                      {"query_id", t.query_id},
                      {"split", t.split},
                      {"query", t.query},
                      {"device_state", t.device_state},
                      {"status", to_id(t.status)},
                      {"steps", steps},
                      {"final_plan", plan},
                      {"final_response", t.final_response}};
    if (!t.diagnostic.empty()) j["diagnostic"] = t.diagnostic;
    if (t.recorded_history) {
        ordered_json turns = ordered_json::array();
        for (const auto& turn : t.recorded_history->turns()) turns.push_back({{"speaker", turn.speaker_label()}, {"content", turn.content}});
        j["history"] = turns;
    }
    return j;
}

inline Trajectory trajectory_from_json(const ordered_json& j) {
    Trajectory t;
    t.query_id = j.at("query_id").get<std::string>();
    t.split = j.value("split", "");
    t.query = j.at("query").get<std::string>();
    t.device_state = j.value("device_state", "");
    std::string status = j.value("status", "completed");
    t.status = status == "aborted" ? EpisodeStatus::Aborted : status == "truncated" ? EpisodeStatus::Truncated : EpisodeStatus::Completed;
    t.diagnostic = j.value("diagnostic", "");
    for (const auto& s : j.at("steps")) {
        Step step;
        auto agent = agent_from_id(s.at("agent").get<std::string>());
        if (!agent) throw Error("unknown agent '" + s.at("agent").get<std::string>() + "'");
        step.agent = *agent;
        step.orchestrator = s.value("orchestrator", agent_choice_text(step.agent));
        step.completion = s.value("completion", "");
        for (const auto& c : s.value("calls", ordered_json::array())) step.calls.push_back(parse_call(c.get<std::string>()));
        for (const auto& r : s.value("results", ordered_json::array())) step.results.push_back(result_from_json(r));
        if (!s.contains("completion")) step.completion = serialize(step.calls);
        t.steps.push_back(std::move(step));
    }
    for (const auto& c : j.value("final_plan", ordered_json::array())) t.final_plan.push_back(parse_call(c.get<std::string>()));
    t.final_response = j.value("final_response", "");
    if (j.contains("history")) {
        MessageHistory h;
        for (const auto& turn : j["history"]) {
            std::string speaker = turn.at("speaker").get<std::string>();
            std::string content = turn.at("content").get<std::string>();
            if (speaker == "User") {
                h.append(Turn::user(content));
            } else if (speaker == "Execution Result") {
                h.append(Turn::result(content));
            } else if (auto kind = parse_agent_name(speaker)) {
                h.append(Turn::by(*kind, content));
            } else {
                throw Error("unknown speaker '" + speaker + "'");
            }
        }
        t.recorded_history = std::move(h);
    }
    return t;
}

} // namespace camphor
