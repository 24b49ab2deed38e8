#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camphor/error.hpp"
#include "camphor/tools/agent_kind.hpp"

namespace camphor {

enum class Speaker { User, Agent, ExecutionResult };

struct Turn {
    Speaker speaker = Speaker::User;
    AgentKind agent = AgentKind::HighOrderReasoning; // meaningful when speaker == Agent
    std::string content;

    static Turn user(std::string text) { return {Speaker::User, AgentKind::HighOrderReasoning, std::move(text)}; }
    static Turn by(AgentKind kind, std::string text) { return {Speaker::Agent, kind, std::move(text)}; }
    static Turn result(std::string text) { return {Speaker::ExecutionResult, AgentKind::HighOrderReasoning, std::move(text)}; }

    std::string speaker_label() const {
        switch (speaker) {
            case Speaker::User: return "User";
            case Speaker::ExecutionResult: return "Execution Result";
            case Speaker::Agent: return std::string(display_name(agent));
        }
        return {};
    }

    friend bool operator==(const Turn& a, const Turn& b) {
        return a.speaker == b.speaker && a.content == b.content && (a.speaker != Speaker::Agent || a.agent == b.agent);
    }
};

namespace detail {

inline const std::vector<std::string>& speaker_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> out = {"User", "Execution Result"};
        for (auto kind : kAllAgents) out.emplace_back(display_name(kind));
        return out;
    }();
    return labels;
}

// Length of a "[Label]: " header at the start of `line`, or 0.
inline std::size_t header_length(std::string_view line) {
    if (line.empty() || line.front() != '[') return 0;
    for (const auto& label : speaker_labels()) {
        if (line.size() >= label.size() + 4 && line.substr(1, label.size()) == label &&
            line.substr(1 + label.size(), 3) == "]: ") {
            return label.size() + 4;
        }
    }
    return 0;
}

inline bool looks_like_header(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && line[i] == '\\') ++i;
    return header_length(line.substr(i)) > 0;
}

// Lines that could be mistaken for a turn header get one extra leading backslash,
// which keeps history rendering injective.
inline std::string escape_content(std::string_view content) {
    std::string out;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = content.find('\n', start);
        std::string_view line = content.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (looks_like_header(line)) out.push_back('\\');
        out += line;
        if (nl == std::string_view::npos) break;
        out.push_back('\n');
        start = nl + 1;
    }
    return out;
}

inline std::string unescape_content(std::string_view content) {
    std::string out;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = content.find('\n', start);
        std::string_view line = content.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line.front() == '\\' && looks_like_header(line)) line.remove_prefix(1);
        out += line;
        if (nl == std::string_view::npos) break;
        out.push_back('\n');
        start = nl + 1;
    }
    return out;
}

} // namespace detail

inline constexpr std::string_view kTurnSeparator = "\n\n";

// Ordered, append-only record of an episode.
class MessageHistory {
public:
    MessageHistory() = default;
    explicit MessageHistory(std::vector<Turn> turns) : turns_(std::move(turns)) {}

    void append(Turn t) { turns_.push_back(std::move(t)); }

    const std::vector<Turn>& turns() const noexcept { return turns_; }
    std::size_t size() const noexcept { return turns_.size(); }
    bool empty() const noexcept { return turns_.empty(); }

    // "[Speaker]: content" turns separated by blank lines.
    std::string render() const {
        std::string out;
        for (std::size_t i = 0; i < turns_.size(); ++i) {
            if (i) out += kTurnSeparator;
            out += "[";
            out += turns_[i].speaker_label();
            out += "]: ";
            out += detail::escape_content(turns_[i].content);
        }
        return out;
    }

    friend bool operator==(const MessageHistory&, const MessageHistory&) = default;

private:
    std::vector<Turn> turns_;
};

// Inverse of MessageHistory::render. Throws Error on text that no history renders to.
inline MessageHistory parse_history(std::string_view text) {
    MessageHistory h;
    if (text.empty()) return h;
    auto make_turn = [](std::string_view label, std::string_view body) {
        std::string content = detail::unescape_content(body);
        if (label == "User") return Turn::user(std::move(content));
        if (label == "Execution Result") return Turn::result(std::move(content));
        for (auto kind : kAllAgents) {
            if (display_name(kind) == label) return Turn::by(kind, std::move(content));
        }
        throw Error("unknown speaker: " + std::string(label));
    };
    std::size_t hdr = detail::header_length(text);
    if (hdr == 0) throw Error("history must start with a speaker header");
    std::size_t pos = 0;
    while (true) {
        std::string_view label = text.substr(pos + 1, hdr - 4);
        std::size_t body_start = pos + hdr;
        std::size_t next = body_start;
        std::size_t next_hdr = 0;
        while (true) {
            next = text.find(kTurnSeparator, next);
            if (next == std::string_view::npos) break;
            next_hdr = detail::header_length(text.substr(next + 2));
            if (next_hdr > 0) break;
            ++next;
        }
        if (next == std::string_view::npos) {
            h.append(make_turn(label, text.substr(body_start)));
            return h;
        }
        h.append(make_turn(label, text.substr(body_start, next - body_start)));
        pos = next + 2;
        hdr = next_hdr;
    }
}

// Structural checks: first turn is User; an Execution Result follows an expert turn
// or another Execution Result.
inline std::vector<std::string> check_history(const MessageHistory& h) {
    std::vector<std::string> problems;
    if (h.empty()) {
        problems.push_back("history is empty");
        return problems;
    }
    if (h.turns().front().speaker != Speaker::User) problems.push_back("first turn is not a User turn");
    for (std::size_t i = 1; i < h.size(); ++i) {
        const Turn& t = h.turns()[i];
        if (t.speaker != Speaker::ExecutionResult) continue;
        const Turn& prev = h.turns()[i - 1];
        bool after_expert = prev.speaker == Speaker::Agent && prev.agent != AgentKind::HighOrderReasoning;
        if (!after_expert && prev.speaker != Speaker::ExecutionResult) {
            problems.push_back("turn " + std::to_string(i) + ": execution result does not follow an expert turn");
        }
    }
    return problems;
}

} // namespace camphor
