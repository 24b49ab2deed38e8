#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "camphor/error.hpp"
#include "camphor/tools/agent_kind.hpp"

namespace camphor {

struct ChatMessage {
    std::string role; // "system" | "user"
    std::string content;
};

// What a backend sees: the agent to act as and its rendered prompt. The query id and
// step index identify the decision for replay backends; device state never crosses.
struct BackendRequest {
    AgentKind agent = AgentKind::HighOrderReasoning;
    std::vector<ChatMessage> messages;
    std::vector<std::string> function_slots; // compressed prompts: tools whose embeddings lead the prompt
    std::string query_id;
    std::size_t step_index = 0;
    int attempt = 0;

    std::string prompt_text() const {
        std::string out;
        for (const auto& m : messages) {
            if (m.content.empty()) continue;
            if (!out.empty()) out += "\n\n";
            out += m.content;
        }
        return out;
    }
};

class BackendError : public Error {
public:
    using Error::Error;
};

class BackendTransportError : public BackendError {
public:
    enum class Kind { Transport, Timeout, Status, MalformedBody };

    BackendTransportError(Kind kind, const std::string& message, int status = 0)
        : BackendError(std::string(kind_name(kind)) + ": " + message), kind_(kind), status_(status) {}

    Kind kind() const noexcept { return kind_; }
    int status() const noexcept { return status_; }

    static std::string_view kind_name(Kind k) {
        switch (k) {
            case Kind::Transport: return "transport";
            case Kind::Timeout: return "timeout";
            case Kind::Status: return "status";
            case Kind::MalformedBody: return "malformed-body";
        }
        return "";
    }

private:
    Kind kind_;
    int status_;
};

class OutOfScriptError : public BackendError {
public:
    using BackendError::BackendError;
};

// Must be safe to call from several episodes at once.
class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual std::string complete(const BackendRequest& request) = 0;
};

} // namespace camphor
