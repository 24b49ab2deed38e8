#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "camphor/device/simulator.hpp"
#include "camphor/runtime/agent_prompts.hpp"
#include "camphor/runtime/backend.hpp"
#include "camphor/runtime/trajectory.hpp"
#include "camphor/tools/call_parser.hpp"

namespace camphor {

inline constexpr std::size_t kDefaultMaxSteps = 20;

struct EpisodeConfig {
    std::size_t max_steps = kDefaultMaxSteps;
    PromptOptions prompt;
    bool baseline_mode = false; // accept Answer/Reflection/Response Submit as TaskCompletion
};

struct EpisodeInput {
    std::string query_id;
    std::string split;
    std::string query;
    std::string device_state;
};

// Everything an episode may do to the device. The runtime holds no DeviceState.
class ToolEnvironment {
public:
    virtual ~ToolEnvironment() = default;
    virtual ExecutionResult execute(const FunctionCall& call) = 0;
    virtual std::vector<ToolDefinition> toolbox(AgentKind agent) const = 0;
};

// Installed tools (device-specific agents) or the full static toolbox (other agents).
inline std::vector<ToolDefinition> device_toolbox(const DeviceState& state, const ToolCatalog& catalog, AgentKind agent) {
    std::vector<ToolDefinition> out;
    for (const auto& t : catalog.owned_by(agent)) {
        if (!has_dynamic_tools(agent) || state.installed_tools.count(t.name)) out.push_back(t);
    }
    return out;
}

class DeviceEnvironment final : public ToolEnvironment {
public:
    DeviceEnvironment(const DeviceState& state, const ToolCatalog& catalog) : state_(&state), catalog_(&catalog), sim_(state, catalog) {}

    ExecutionResult execute(const FunctionCall& call) override { return sim_.execute(call); }

    std::vector<ToolDefinition> toolbox(AgentKind agent) const override { return device_toolbox(*state_, *catalog_, agent); }

    const Simulator& simulator() const noexcept { return sim_; }

private:
    const DeviceState* state_;
    const ToolCatalog* catalog_;
    Simulator sim_;
};

class UnrecognizedAgentName : public Error {
public:
    using Error::Error;
};

struct AgentChoice {
    AgentKind agent;
    std::string completion;
};

// Asks the backend for the next expert; one retry on an unrecognized answer.
inline AgentChoice select_next_agent(AgentBackend& backend, BackendRequest request, bool baseline_mode = false) {
    request.agent = AgentKind::HighOrderReasoning;
    std::string last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        request.attempt = attempt;
        last = backend.complete(request);
        auto kind = parse_agent_name(last, baseline_mode);
        if (kind && *kind != AgentKind::HighOrderReasoning) return {*kind, last};
    }
    throw UnrecognizedAgentName("unrecognized agent name from orchestrator: '" + last + "'");
}

inline AgentChoice select_next_agent(AgentBackend& backend, const MessageHistory& history, const PromptOptions& options = {},
                                     bool baseline_mode = false) {
    BackendRequest request;
    request.messages = to_messages(orchestrator_prompt(history, options));
    return select_next_agent(backend, std::move(request), baseline_mode);
}

inline constexpr std::string_view kResponseMarker = "Textual Response:";
inline constexpr std::string_view kCallsMarker = "Task Completion API Calls:";

struct TaskCompletionOutput {
    std::string response;
    std::string calls_text;
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace detail

// Splits "Textual Response: ... Task Completion API Calls: [...]". Without the calls
// marker the whole completion is the call list.
inline TaskCompletionOutput split_task_completion(std::string_view text) {
    TaskCompletionOutput out;
    auto calls_at = text.rfind(kCallsMarker);
    if (calls_at == std::string_view::npos) {
        out.calls_text = detail::trim(text);
        return out;
    }
    out.calls_text = detail::trim(text.substr(calls_at + kCallsMarker.size()));
    std::string_view head = text.substr(0, calls_at);
    if (auto r = head.find(kResponseMarker); r != std::string_view::npos) head = head.substr(r + kResponseMarker.size());
    out.response = detail::trim(head);
    return out;
}

/*
 * Runs one query to termination.
 *
 * Each step: the orchestrator names an expert; the expert's completion is parsed into
 * calls; the calls execute and their results join the history. UserPerception skips
 * the model and calls get_intent() directly. The episode completes when the
 * TaskCompletion agent emits its plan, is truncated after max_steps expert steps, or
 * aborts on backend failure or output still unparseable after one retry.
 */
inline Trajectory run_episode(AgentBackend& backend, ToolEnvironment& env, const EpisodeInput& input, const EpisodeConfig& config) {
    Trajectory t;
    t.query_id = input.query_id;
    t.split = input.split;
    t.query = input.query;
    t.device_state = input.device_state;
    if (config.max_steps < 1) throw ConfigError("max_steps must be at least 1");

    MessageHistory history;
    history.append(Turn::user(input.query));

    auto abort_with = [&](const std::string& why) {
        t.status = EpisodeStatus::Aborted;
        t.diagnostic = why;
        return t;
    };

    while (t.steps.size() < config.max_steps) {
        BackendRequest request;
        request.query_id = input.query_id;
        request.step_index = t.steps.size();

        Step step;
        try {
            request.messages = to_messages(orchestrator_prompt(history, config.prompt));
            auto choice = select_next_agent(backend, request, config.baseline_mode);
            step.agent = choice.agent;
            step.orchestrator = choice.completion;
        } catch (const BackendError& e) {
            return abort_with(std::string("backend: ") + e.what());
        } catch (const UnrecognizedAgentName& e) {
            return abort_with(e.what());
        }
        history.append(Turn::by(AgentKind::HighOrderReasoning, step.orchestrator));

        TaskCompletionOutput tc;
        if (step.agent == AgentKind::UserPerception) {
            step.calls = {FunctionCall{"get_intent", {}}};
            step.completion = serialize(step.calls);
        } else {
            auto prompt = expert_prompt(step.agent, history, env.toolbox(step.agent), input.query, config.prompt);
            request.agent = step.agent;
            request.messages = to_messages(prompt);
            request.function_slots = prompt.slot_tools;
            std::optional<ParseError> parse_error;
            for (int attempt = 0; attempt < 2; ++attempt) {
                request.attempt = attempt;
                try {
                    step.completion = backend.complete(request);
                } catch (const BackendError& e) {
                    return abort_with(std::string("backend: ") + e.what());
                }
                std::string calls_text = step.completion;
                if (step.agent == AgentKind::TaskCompletion) {
                    tc = split_task_completion(step.completion);
                    calls_text = tc.calls_text;
                }
                auto parsed = try_parse_call_list(calls_text);
                if (parsed.ok()) {
                    step.calls = std::move(parsed.calls);
                    parse_error.reset();
                    break;
                }
                parse_error = parsed.error;
            }
            if (parse_error) {
                return abort_with(std::string(display_name(step.agent)) + " output unparseable: " + parse_error->what());
            }
        }
        history.append(Turn::by(step.agent, step.completion));

        for (const auto& call : step.calls) step.results.push_back(env.execute(call));

        if (step.agent == AgentKind::TaskCompletion) {
            t.final_plan = step.calls;
            t.final_response = tc.response;
            t.steps.push_back(std::move(step));
            t.status = EpisodeStatus::Completed;
            return t;
        }
        for (const auto& r : step.results) history.append(Turn::result(render_result(r)));
        t.steps.push_back(std::move(step));
    }
    t.status = EpisodeStatus::Truncated;
    t.diagnostic = "no TaskCompletion within " + std::to_string(config.max_steps) + " steps";
    return t;
}

inline Trajectory run_episode(AgentBackend& backend, const DeviceState& state, const ToolCatalog& catalog, const EpisodeInput& input,
                              const EpisodeConfig& config = {}) {
    DeviceEnvironment env(state, catalog);
    return run_episode(backend, env, input, config);
}

// Replays gold trajectories: the gold agent choice and the gold completion, verbatim.
class ScriptedOracle final : public AgentBackend {
public:
    explicit ScriptedOracle(const std::vector<Trajectory>& gold) {
        for (const auto& t : gold) script_.emplace(t.query_id, t);
    }

    std::string complete(const BackendRequest& request) override {
        auto it = script_.find(request.query_id);
        if (it == script_.end()) throw OutOfScriptError("no gold trajectory for query '" + request.query_id + "'");
        const auto& steps = it->second.steps;
        if (request.step_index >= steps.size()) {
            throw OutOfScriptError("query '" + request.query_id + "' has " + std::to_string(steps.size()) + " gold steps; step " +
                                   std::to_string(request.step_index + 1) + " requested");
        }
        const Step& step = steps[request.step_index];
        if (request.agent == AgentKind::HighOrderReasoning) return step.orchestrator;
        if (request.agent != step.agent) {
            throw OutOfScriptError("query '" + request.query_id + "' step " + std::to_string(request.step_index + 1) + ": gold agent is " +
                                   std::string(to_id(step.agent)) + ", asked for " + std::string(to_id(request.agent)));
        }
        return step.completion;
    }

private:
    std::map<std::string, Trajectory> script_;
};

} // namespace camphor
