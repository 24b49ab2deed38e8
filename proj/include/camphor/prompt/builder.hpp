#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camphor/error.hpp"
#include "camphor/prompt/templates.hpp"
#include "camphor/prompt/tokenizer.hpp"
#include "camphor/runtime/history.hpp"
#include "camphor/tools/catalog.hpp"

namespace camphor {

enum class PromptMode { FullText, Retrieved, Compressed };

inline std::string_view to_id(PromptMode m) {
    switch (m) {
        case PromptMode::FullText: return "full_text";
        case PromptMode::Retrieved: return "retrieved";
        case PromptMode::Compressed: return "compressed";
    }
    return "";
}

inline PromptMode prompt_mode_from_id(std::string_view id) {
    if (id == "full_text" || id == "full") return PromptMode::FullText;
    if (id == "retrieved" || id == "rag") return PromptMode::Retrieved;
    if (id == "compressed") return PromptMode::Compressed;
    throw ConfigError("unknown prompt mode: " + std::string(id));
}

class MissingTools : public Error {
public:
    using Error::Error;
};

// Inputs of the prompt formatting function: instruction, history, tool definitions.
struct PromptSpec {
    AgentKind agent = AgentKind::HighOrderReasoning;
    std::optional<std::string> instruction; // unset: the agent's default instruction
    MessageHistory history;
    std::optional<std::vector<ToolDefinition>> tools; // Retrieved mode: the already-retrieved top K
    PromptMode mode = PromptMode::FullText;
    bool include_instruction = true;
};

enum class SegmentKind { ToolSection, Instruction, Template, History };

struct PromptSegment {
    SegmentKind kind;
    std::string text;
};

struct FunctionSlot {
    std::string tool;
    std::size_t index = 0;  // token index of the slot
    bool trainable = false; // slot embeddings are frozen inputs
};

struct LayoutCounts {
    std::size_t static_tokens = 0;  // non-history prompt tokens
    std::size_t history_tokens = 0;
    std::size_t function_slots = 0;
};

/*
 * Token sequence of a prompt with its compression layout.
 *
 * Function slots occupy the first |slots| token indices and all sit at position 0;
 * text tokens follow at positions 1, 2, ... . Attention:
 *   slot  -> slot       only itself
 *   slot  -> text       never (slots precede the text)
 *   text  -> slot       always
 *   text  -> text       causal (key index <= query index)
 */
struct PromptLayout {
    std::vector<std::string> tokens; // slot placeholders "<fn:name>" then text tokens
    std::vector<FunctionSlot> function_slots;
    std::vector<std::size_t> position_indices;
    LayoutCounts counts;

    std::size_t size() const noexcept { return tokens.size(); }
    std::size_t slot_count() const noexcept { return function_slots.size(); }

    bool attends(std::size_t query, std::size_t key) const {
        const std::size_t slots = function_slots.size();
        if (query < slots) return key == query;
        if (key < slots) return true;
        return key <= query;
    }

    // Dense row-major mask, 1 where `row` may attend `col`.
    std::vector<std::uint8_t> mask_matrix() const {
        const std::size_t n = size();
        std::vector<std::uint8_t> m(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m[i * n + j] = attends(i, j) ? 1 : 0;
        }
        return m;
    }
};

struct RenderedPrompt {
    AgentKind agent = AgentKind::HighOrderReasoning;
    PromptMode mode = PromptMode::FullText;
    std::vector<PromptSegment> segments;
    std::vector<std::string> slot_tools; // compressed mode: one slot per tool, in order

    std::string system() const { return join(true); }
    std::string user() const { return join(false); }

    std::string text() const {
        std::string out;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (i) out += "\n\n";
            out += segments[i].text;
        }
        return out;
    }

    const PromptSegment* find(SegmentKind kind) const {
        for (const auto& s : segments) {
            if (s.kind == kind) return &s;
        }
        return nullptr;
    }

private:
    std::string join(bool system_part) const {
        std::string out;
        for (const auto& s : segments) {
            if ((s.kind == SegmentKind::ToolSection) != system_part) continue;
            if (!out.empty()) out += "\n\n";
            out += s.text;
        }
        return out;
    }
};

inline std::string render_tool_section(const std::vector<ToolDefinition>& tools) {
    std::string out(kToolSectionHeader);
    for (const auto& t : tools) {
        out.push_back('\n');
        out += t.definition_text();
    }
    return out;
}

inline RenderedPrompt render_prompt(const PromptSpec& spec) {
    RenderedPrompt out;
    out.agent = spec.agent;
    out.mode = spec.mode;
    if (!spec.tools && has_dynamic_tools(spec.agent) && spec.mode != PromptMode::Compressed) {
        throw MissingTools(std::string(display_name(spec.agent)) + " needs tool definitions in " +
                           std::string(to_id(spec.mode)) + " mode");
    }
    if (spec.tools) {
        if (spec.mode == PromptMode::Compressed) {
            for (const auto& t : *spec.tools) out.slot_tools.push_back(t.name);
        } else if (!spec.tools->empty()) {
            out.segments.push_back({SegmentKind::ToolSection, render_tool_section(*spec.tools)});
        }
    }
    if (spec.include_instruction) {
        auto instruction = spec.instruction ? spec.instruction : default_instruction(spec.agent);
        if (instruction && !instruction->empty()) out.segments.push_back({SegmentKind::Instruction, *instruction});
    }
    out.segments.push_back({SegmentKind::Template, std::string(kHistoryHeader)});
    out.segments.push_back({SegmentKind::History, spec.history.render()});
    return out;
}

// Lays `slot_count` function slots in front of `text_tokens`.
inline PromptLayout build_layout(const std::vector<std::string>& slot_tools, const std::vector<std::string>& text_tokens) {
    PromptLayout layout;
    layout.tokens.reserve(slot_tools.size() + text_tokens.size());
    for (std::size_t i = 0; i < slot_tools.size(); ++i) {
        layout.tokens.push_back("<fn:" + slot_tools[i] + ">");
        layout.function_slots.push_back({slot_tools[i], i, false});
        layout.position_indices.push_back(0);
    }
    for (std::size_t i = 0; i < text_tokens.size(); ++i) {
        layout.tokens.push_back(text_tokens[i]);
        layout.position_indices.push_back(i + 1);
    }
    layout.counts.function_slots = slot_tools.size();
    layout.counts.static_tokens = text_tokens.size();
    return layout;
}

inline PromptLayout build_layout(const std::vector<ToolDefinition>& tools, const RenderedPrompt& prompt, const Tokenizer& tokenizer) {
    std::vector<std::string> names;
    names.reserve(tools.size());
    for (const auto& t : tools) names.push_back(t.name);
    std::vector<std::string> text_tokens;
    std::size_t history = 0;
    for (const auto& seg : prompt.segments) {
        auto toks = tokenizer.tokenize(seg.text);
        if (seg.kind == SegmentKind::History) history += toks.size();
        text_tokens.insert(text_tokens.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
    }
    PromptLayout layout = build_layout(names, text_tokens);
    layout.counts.history_tokens = history;
    layout.counts.static_tokens = text_tokens.size() - history;
    return layout;
}

// Layout of a rendered prompt: slots for compressed prompts, plain causal otherwise.
inline PromptLayout layout_of(const RenderedPrompt& prompt, const ToolCatalog& catalog, const Tokenizer& tokenizer) {
    std::vector<ToolDefinition> tools;
    for (const auto& name : prompt.slot_tools) {
        if (const auto* t = catalog.find(name)) {
            tools.push_back(*t);
        } else {
            tools.push_back(ToolDefinition{name, "", {}, prompt.agent});
        }
    }
    return build_layout(tools, prompt, tokenizer);
}

} // namespace camphor
