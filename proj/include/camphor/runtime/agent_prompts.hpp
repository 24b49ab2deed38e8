#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "camphor/prompt/builder.hpp"
#include "camphor/retrieval/retriever.hpp"
#include "camphor/runtime/backend.hpp"
#include "camphor/runtime/history.hpp"

namespace camphor {

struct PromptOptions {
    PromptMode mode = PromptMode::FullText;
    std::size_t retrieved_k = 5;
    bool include_instruction = true;
    const Retriever* retriever = nullptr; // Retrieved mode; lexical when unset
};

// Orchestrator prompt: instruction and history, no tool section.
inline RenderedPrompt orchestrator_prompt(const MessageHistory& history, const PromptOptions& options) {
    PromptSpec spec;
    spec.agent = AgentKind::HighOrderReasoning;
    spec.history = history;
    spec.mode = options.mode == PromptMode::Compressed ? PromptMode::Compressed : PromptMode::FullText;
    spec.include_instruction = options.include_instruction;
    return render_prompt(spec);
}

// Tools shown to an expert: the device toolbox, narrowed to the top K in Retrieved mode.
inline std::vector<ToolDefinition> prompt_tools(const std::vector<ToolDefinition>& toolbox, const std::string& query,
                                                const PromptOptions& options) {
    if (options.mode != PromptMode::Retrieved || toolbox.empty()) return toolbox;
    static const LexicalRetriever lexical;
    const Retriever& r = options.retriever ? *options.retriever : lexical;
    return retrieve_topk(query, toolbox, std::min(options.retrieved_k, toolbox.size()), r);
}

// Expert prompt. Only agents with device-specific toolboxes get tool definitions;
// the static toolboxes are left for the model to memorize.
inline RenderedPrompt expert_prompt(AgentKind agent, const MessageHistory& history, const std::vector<ToolDefinition>& toolbox,
                                    const std::string& query, const PromptOptions& options) {
    PromptSpec spec;
    spec.agent = agent;
    spec.history = history;
    spec.mode = options.mode;
    spec.include_instruction = options.include_instruction;
    if (has_dynamic_tools(agent)) spec.tools = prompt_tools(toolbox, query, options);
    return render_prompt(spec);
}

inline std::vector<ChatMessage> to_messages(const RenderedPrompt& p) {
    std::vector<ChatMessage> out;
    std::string system = p.system();
    if (!system.empty()) out.push_back({"system", std::move(system)});
    out.push_back({"user", p.user()});
    return out;
}

} // namespace camphor
