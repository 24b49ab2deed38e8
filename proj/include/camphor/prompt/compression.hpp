#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/prompt/builder.hpp"
#include "camphor/prompt/tokenizer.hpp"
#include "camphor/tools/catalog.hpp"

namespace camphor {

struct AgentCompression {
    AgentKind agent = AgentKind::PersonalContext;
    std::size_t tool_count = 0;
    std::size_t raw_tool_tokens = 0;        // sum of per-definition token counts
    std::size_t compressed_tool_tokens = 0; // one slot per tool
    std::size_t static_full_text = 0;       // whole prompt minus history, tools inlined
    std::size_t static_compressed = 0;      // whole prompt minus history, slots instead

    // 1 - slots / raw tool tokens.
    double tool_reduction() const {
        return raw_tool_tokens == 0 ? 0.0 : 1.0 - static_cast<double>(compressed_tool_tokens) / static_cast<double>(raw_tool_tokens);
    }

    double static_reduction() const {
        return static_full_text == 0 ? 0.0 : 1.0 - static_cast<double>(static_compressed) / static_cast<double>(static_full_text);
    }
};

struct CompressionReport {
    std::string tokenizer;
    bool include_instruction = true;
    std::vector<AgentCompression> agents;

    const AgentCompression* find(AgentKind kind) const {
        for (const auto& a : agents) {
            if (a.agent == kind) return &a;
        }
        return nullptr;
    }
};

inline AgentCompression measure_compression(AgentKind agent, const std::vector<ToolDefinition>& tools, const Tokenizer& tokenizer,
                                            bool include_instruction = true) {
    AgentCompression c;
    c.agent = agent;
    c.tool_count = tools.size();
    for (const auto& t : tools) c.raw_tool_tokens += tokenizer.count(t.definition_text());
    c.compressed_tool_tokens = tools.size();

    PromptSpec spec;
    spec.agent = agent;
    spec.tools = tools;
    spec.include_instruction = include_instruction;
    spec.mode = PromptMode::FullText;
    auto full = render_prompt(spec);
    c.static_full_text = build_layout(std::vector<ToolDefinition>{}, full, tokenizer).counts.static_tokens;
    spec.mode = PromptMode::Compressed;
    auto compressed = render_prompt(spec);
    auto layout = build_layout(tools, compressed, tokenizer);
    c.static_compressed = layout.counts.static_tokens + layout.counts.function_slots;
    return c;
}

// Static prompt size (message history excluded) with and without compression for
// the two agents whose toolbox is device-specific.
inline CompressionReport token_report(const ToolCatalog& catalog, const Tokenizer& tokenizer, bool include_instruction = true) {
    CompressionReport report;
    report.tokenizer = tokenizer.id();
    report.include_instruction = include_instruction;
    for (auto agent : {AgentKind::PersonalContext, AgentKind::TaskCompletion}) {
        report.agents.push_back(measure_compression(agent, catalog.owned_by(agent), tokenizer, include_instruction));
    }
    return report;
}

inline nlohmann::ordered_json compression_report_to_json(const CompressionReport& r) {
    nlohmann::ordered_json agents = nlohmann::ordered_json::array();
    for (const auto& a : r.agents) {
        agents.push_back({{"agent", to_id(a.agent)},
                          {"tool_count", a.tool_count},
                          {"raw_tool_tokens", a.raw_tool_tokens},
                          {"compressed_tool_tokens", a.compressed_tool_tokens},
                          {"tool_token_reduction", a.tool_reduction()},
                          {"static_tokens_full_text", a.static_full_text},
                          {"static_tokens_compressed", a.static_compressed},
                          {"static_token_reduction", a.static_reduction()}});
    }
    return {{"format_version", 1}, {"tokenizer", r.tokenizer}, {"include_instruction", r.include_instruction}, {"agents", agents}};
}

inline std::string format_percent_delta(double reduction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", -100.0 * reduction);
    return buf;
}

inline std::string compression_table(const CompressionReport& r) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-22s | %-21s | %-18s | %s\n", "Metric", "No Prompt Compression", "Prompt Compression", "Relative Delta");
    out += line;
    out += std::string(22, '-') + "-+-" + std::string(21, '-') + "-+-" + std::string(18, '-') + "-+-" + std::string(14, '-') + "\n";
    for (const auto& a : r.agents) {
        std::string label = a.agent == AgentKind::PersonalContext ? "# of PC Tool Tokens" : "# of TC Tool Tokens";
        std::snprintf(line, sizeof(line), "%-22s | %-21zu | %-18zu | %s\n", label.c_str(), a.raw_tool_tokens, a.compressed_tool_tokens,
                      format_percent_delta(a.tool_reduction()).c_str());
        out += line;
    }
    for (const auto& a : r.agents) {
        std::string label = a.agent == AgentKind::PersonalContext ? "PC static tokens" : "TC static tokens";
        std::snprintf(line, sizeof(line), "%-22s | %-21zu | %-18zu | %s\n", label.c_str(), a.static_full_text, a.static_compressed,
                      format_percent_delta(a.static_reduction()).c_str());
        out += line;
    }
    return out;
}

} // namespace camphor
