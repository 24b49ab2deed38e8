#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/device/state.hpp"
#include "camphor/runtime/agent_prompts.hpp"
#include "camphor/runtime/episode.hpp"
#include "camphor/runtime/trajectory.hpp"

namespace camphor {

enum class PairKind { Orchestrator, Expert };

inline std::string_view to_id(PairKind k) { return k == PairKind::Orchestrator ? "orchestrator" : "expert"; }

// One supervised decision: the prompt a model saw and the gold completion.
struct PromptCompletionPair {
    std::string query_id;
    std::size_t step_index = 0; // trajectory step the decision belongs to
    PairKind kind = PairKind::Orchestrator;
    AgentKind agent = AgentKind::HighOrderReasoning;
    std::string prompt;
    std::string completion;
};

using ToolboxFn = std::function<std::vector<ToolDefinition>(const Trajectory&, AgentKind)>;

/*
 * Per step: an orchestrator pair (history -> agent name) and an expert pair (history,
 * instruction, tools -> call list). UserPerception steps have no expert pair because
 * no model produces get_intent().
 */
inline std::vector<PromptCompletionPair> flatten_trajectory(const Trajectory& t, const ToolboxFn& toolbox, const PromptOptions& options = {}) {
    std::vector<PromptCompletionPair> out;
    MessageHistory h;
    h.append(Turn::user(t.query));
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const Step& s = t.steps[i];
        out.push_back({t.query_id, i, PairKind::Orchestrator, AgentKind::HighOrderReasoning, orchestrator_prompt(h, options).text(),
                       s.orchestrator});
        if (s.agent != AgentKind::UserPerception) {
            MessageHistory with_choice = h;
            with_choice.append(Turn::by(AgentKind::HighOrderReasoning, s.orchestrator));
            auto prompt = expert_prompt(s.agent, with_choice, toolbox(t, s.agent), t.query, options);
            out.push_back({t.query_id, i, PairKind::Expert, s.agent, prompt.text(), s.completion});
        }
        append_step_turns(h, s);
    }
    return out;
}

inline ToolboxFn state_toolbox(const std::map<std::string, DeviceState>& states, const ToolCatalog& catalog) {
    return [&states, &catalog](const Trajectory& t, AgentKind agent) {
        auto it = states.find(t.device_state);
        if (it == states.end()) throw ConfigError("query " + t.query_id + ": unknown device state '" + t.device_state + "'");
        return device_toolbox(it->second, catalog, agent);
    };
}

// Every catalog tool of the agent, for data sets without device states.
inline ToolboxFn catalog_toolbox(const ToolCatalog& catalog) {
    return [&catalog](const Trajectory&, AgentKind agent) { return catalog.owned_by(agent); };
}

inline std::vector<PromptCompletionPair> flatten(const std::vector<Trajectory>& data, const ToolboxFn& toolbox, const PromptOptions& options = {}) {
    std::vector<PromptCompletionPair> out;
    for (const auto& t : data) {
        auto pairs = flatten_trajectory(t, toolbox, options);
        out.insert(out.end(), std::make_move_iterator(pairs.begin()), std::make_move_iterator(pairs.end()));
    }
    return out;
}

// Pairs a trajectory flattens to, without rendering anything.
inline std::size_t pair_count(const Trajectory& t) {
    std::size_t n = 0;
    for (const auto& s : t.steps) n += s.agent == AgentKind::UserPerception ? 1 : 2;
    return n;
}

inline nlohmann::ordered_json pair_to_json(const PromptCompletionPair& p) {
    return {{"query_id", p.query_id}, {"step_index", p.step_index}, {"kind", to_id(p.kind)},
            {"agent", to_id(p.agent)},   {"prompt", p.prompt},         {"completion", p.completion}};
}

inline std::string pairs_to_jsonl(const std::vector<PromptCompletionPair>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        out += pair_to_json(p).dump();
        out += '\n';
    }
    return out;
}

} // namespace camphor
