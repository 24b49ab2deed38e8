#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "camphor/error.hpp"

namespace camphor {

enum class AgentKind {
    HighOrderReasoning,
    DeviceInformation,
    UserPerception,
    PersonalContext,
    ExternalKnowledge,
    TaskCompletion,
};

inline constexpr std::array<AgentKind, 6> kAllAgents = {
    AgentKind::HighOrderReasoning, AgentKind::DeviceInformation, AgentKind::UserPerception,
    AgentKind::PersonalContext,    AgentKind::ExternalKnowledge, AgentKind::TaskCompletion,
};

// Identifier used in catalog and dataset files.
inline std::string_view to_id(AgentKind kind) {
    switch (kind) {
        case AgentKind::HighOrderReasoning: return "HighOrderReasoning";
        case AgentKind::DeviceInformation: return "DeviceInformation";
        case AgentKind::UserPerception: return "UserPerception";
        case AgentKind::PersonalContext: return "PersonalContext";
        case AgentKind::ExternalKnowledge: return "ExternalKnowledge";
        case AgentKind::TaskCompletion: return "TaskCompletion";
    }
    return "";
}

// Speaker name used in rendered message histories.
inline std::string_view display_name(AgentKind kind) {
    switch (kind) {
        case AgentKind::HighOrderReasoning: return "High Order Reasoning Agent";
        case AgentKind::DeviceInformation: return "Device Information Agent";
        case AgentKind::UserPerception: return "User Perception Agent";
        case AgentKind::PersonalContext: return "Personal Context Agent";
        case AgentKind::ExternalKnowledge: return "External Knowledge Agent";
        case AgentKind::TaskCompletion: return "Task Completion Agent";
    }
    return "";
}

inline std::optional<AgentKind> agent_from_id(std::string_view id) {
    for (auto kind : kAllAgents) {
        if (to_id(kind) == id) return kind;
    }
    return std::nullopt;
}

namespace detail {

inline std::string squash_name(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

} // namespace detail

// Accepts "[Device Information Agent]", "Device Information Agent", "DeviceInformation"
// and the same names without the "Agent" suffix. With baseline_roles, the appendix
// baseline roles (Answer, Reflection, Response Submit) resolve to TaskCompletion.
inline std::optional<AgentKind> parse_agent_name(std::string_view text, bool baseline_roles = false) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return std::nullopt;
    auto last = text.find_last_not_of(" \t\r\n");
    text = text.substr(first, last - first + 1);
    if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
        text = text.substr(1, text.size() - 2);
    }
    std::string key = detail::squash_name(text);
    if (key.size() > 5 && key.ends_with("agent")) key.resize(key.size() - 5);
    if (key.empty()) return std::nullopt;

    for (auto kind : kAllAgents) {
        if (detail::squash_name(to_id(kind)) == key) return kind;
    }
    if (baseline_roles && (key == "answer" || key == "reflection" || key == "responsesubmit")) {
        return AgentKind::TaskCompletion;
    }
    return std::nullopt;
}

// Agents whose toolbox depends on the apps installed on the device.
inline bool has_dynamic_tools(AgentKind kind) {
    return kind == AgentKind::PersonalContext || kind == AgentKind::TaskCompletion;
}

} // namespace camphor
