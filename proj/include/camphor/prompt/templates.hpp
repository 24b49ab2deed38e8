#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "camphor/tools/agent_kind.hpp"

namespace camphor {

inline constexpr std::string_view kTaskDescription =
    "You are a helpful digital assistant. An iPhone user has issued a query to you. Your ultimate goal is to "
    "provide an accurate and helpful response and complete any related tasks. This may involve utilizing "
    "additional context, such as personal contexts and relevant facts, to enhance the user experience.";

inline constexpr std::string_view kToolSectionHeader = "Here are available API calls:";
inline constexpr std::string_view kHistoryHeader = "Here is the message history:";
inline constexpr std::string_view kOutputFormatHint =
    "Strictly use only the available API calls and separate each API call by semicolons in a list.";

// Agent-specific task instruction. UserPerception never reaches the model.
inline std::optional<std::string> default_instruction(AgentKind kind) {
    switch (kind) {
        case AgentKind::HighOrderReasoning:
            return "Now your task is to decide which expert agent to invoke next based on the message history. "
                   "Answer with the agent name in brackets, for example [Personal Context Agent]. "
                   "Invoke the [Task Completion Agent] once enough information has been gathered.";
        case AgentKind::DeviceInformation:
            return "Now your task is to generate accurate and helpful API calls to retrieve device information "
                   "based on the message history.";
        case AgentKind::UserPerception:
            return std::nullopt;
        case AgentKind::PersonalContext:
            return "Now your task is to generate accurate and helpful API calls to retrieve personal context based "
                   "on the message history.";
        case AgentKind::ExternalKnowledge:
            return "Now your task is to generate accurate and helpful API calls to retrieve relevant facts or public "
                   "information based on the message history.";
        case AgentKind::TaskCompletion:
            return "Now your task is to generate accurate and personalized textual response and task completion API "
                   "calls for user based on the message history.";
    }
    return std::nullopt;
}

} // namespace camphor
