#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "camphor/prompt/builder.hpp"
#include "camphor/prompt/compression.hpp"
#include "camphor/prompt/embedding.hpp"
#include "camphor/prompt/tokenizer.hpp"
#include "camphor/runtime/agent_prompts.hpp"
#include "support.hpp"

namespace camphor {
namespace {

MessageHistory short_history() {
    MessageHistory h;
    h.append(Turn::user("Text my travel buddy"));
    h.append(Turn::by(AgentKind::HighOrderReasoning, "[Personal Context Agent]"));
    return h;
}

// A tool whose definition text is exactly `tokens` wordpunct tokens (tokens >= 4).
ToolDefinition sized_tool(std::size_t i, std::size_t tokens) {
    std::string desc;
    for (std::size_t k = 0; k + 4 < tokens; ++k) desc += (k ? " w" : "w") + std::to_string(k);
    return {"t" + std::to_string(i), desc, {}, AgentKind::PersonalContext};
}

TEST(Tokenizer, WordPunct) {
    WordPunctTokenizer t;
    EXPECT_EQ(t.tokenize("get_notes_content(keyword)"),
              (std::vector<std::string>{"get", "_", "notes", "_", "content", "(", "keyword", ")"}));
    EXPECT_EQ(t.count("  "), 0u);
    EXPECT_EQ(t.count("€29.99 flight"), 4u);
    for (std::size_t n : {4u, 10u, 37u}) EXPECT_EQ(t.count(sized_tool(0, n).definition_text()), n);
}

TEST(Tokenizer, WhitespaceAndFactory) {
    WhitespaceTokenizer t;
    EXPECT_EQ(t.tokenize(" a\tb\n c "), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(make_tokenizer("")->id(), "wordpunct");
    EXPECT_EQ(make_tokenizer("whitespace")->id(), "whitespace");
    EXPECT_THROW(make_tokenizer("bpe"), ConfigError);
}

TEST(PromptBuilder, FullTextPutsToolsInTheSystemPart) {
    PromptSpec spec;
    spec.agent = AgentKind::PersonalContext;
    spec.history = short_history();
    spec.tools = default_catalog().owned_by(AgentKind::PersonalContext);
    auto p = render_prompt(spec);
    ASSERT_EQ(p.segments.size(), 4u);
    EXPECT_EQ(p.segments[0].kind, SegmentKind::ToolSection);
    EXPECT_EQ(p.segments[1].kind, SegmentKind::Instruction);
    EXPECT_EQ(p.segments[2].kind, SegmentKind::Template);
    EXPECT_EQ(p.segments[3].kind, SegmentKind::History);
    EXPECT_EQ(p.system().rfind("Here are available API calls:\n", 0), 0u);
    EXPECT_NE(p.system().find("get_contacts_information(keyword): "), std::string::npos);
    EXPECT_EQ(p.user().rfind("Now your task is", 0), 0u);
    EXPECT_NE(p.user().find("[User]: Text my travel buddy"), std::string::npos);
    EXPECT_TRUE(p.slot_tools.empty());
}

TEST(PromptBuilder, CompressedReplacesToolTextWithSlots) {
    PromptSpec spec;
    spec.agent = AgentKind::PersonalContext;
    spec.history = short_history();
    spec.tools = default_catalog().owned_by(AgentKind::PersonalContext);
    spec.mode = PromptMode::Compressed;
    auto p = render_prompt(spec);
    EXPECT_EQ(p.find(SegmentKind::ToolSection), nullptr);
    EXPECT_TRUE(p.system().empty());
    ASSERT_EQ(p.slot_tools.size(), 23u);
    EXPECT_EQ(p.slot_tools.front(), spec.tools->front().name);
    EXPECT_EQ(p.text().find("get_contacts_information"), std::string::npos);
}

TEST(PromptBuilder, InstructionCanBeDroppedOrReplaced) {
    PromptSpec spec;
    spec.agent = AgentKind::DeviceInformation;
    spec.include_instruction = false;
    EXPECT_EQ(render_prompt(spec).find(SegmentKind::Instruction), nullptr);
    spec.include_instruction = true;
    spec.instruction = "Only answer with calls.";
    EXPECT_EQ(render_prompt(spec).find(SegmentKind::Instruction)->text, "Only answer with calls.");
}

TEST(PromptBuilder, DynamicAgentsNeedTools) {
    PromptSpec spec;
    spec.agent = AgentKind::TaskCompletion;
    EXPECT_THROW(render_prompt(spec), MissingTools);
    spec.mode = PromptMode::Retrieved;
    EXPECT_THROW(render_prompt(spec), MissingTools);
    spec.agent = AgentKind::ExternalKnowledge;
    EXPECT_NO_THROW(render_prompt(spec));
}

TEST(PromptBuilder, StaticAgentsGetNoToolSection) {
    auto p = expert_prompt(AgentKind::DeviceInformation, short_history(), default_catalog().owned_by(AgentKind::DeviceInformation), "q", {});
    EXPECT_EQ(p.find(SegmentKind::ToolSection), nullptr);
    auto o = orchestrator_prompt(short_history(), {});
    EXPECT_EQ(o.find(SegmentKind::ToolSection), nullptr);
    EXPECT_NE(o.user().find("[Task Completion Agent]"), std::string::npos);
}

TEST(PromptBuilder, ModeIds) {
    for (auto m : {PromptMode::FullText, PromptMode::Retrieved, PromptMode::Compressed}) EXPECT_EQ(prompt_mode_from_id(to_id(m)), m);
    EXPECT_THROW(prompt_mode_from_id("zip"), ConfigError);
}

TEST(Layout, PositionsAndMask) {
    auto layout = build_layout({"a", "b", "c"}, {"x", "y", "z", "w"});
    EXPECT_EQ(layout.position_indices, (std::vector<std::size_t>{0, 0, 0, 1, 2, 3, 4}));
    EXPECT_EQ(layout.tokens[0], "<fn:a>");
    EXPECT_EQ(layout.slot_count(), 3u);
    // Rows are queries.
    const std::vector<std::uint8_t> expected = {
        1, 0, 0, 0, 0, 0, 0,
        0, 1, 0, 0, 0, 0, 0,
        0, 0, 1, 0, 0, 0, 0,
        1, 1, 1, 1, 0, 0, 0,
        1, 1, 1, 1, 1, 0, 0,
        1, 1, 1, 1, 1, 1, 0,
        1, 1, 1, 1, 1, 1, 1,
    };
    EXPECT_EQ(layout.mask_matrix(), expected);
}

TEST(Layout, WithoutSlotsIsPlainCausal) {
    auto layout = build_layout(std::vector<std::string>{}, {"x", "y", "z"});
    EXPECT_EQ(layout.position_indices, (std::vector<std::size_t>{1, 2, 3}));
    auto m = layout.mask_matrix();
    for (std::size_t q = 0; q < 3; ++q) {
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(m[q * 3 + k], k <= q ? 1 : 0);
    }
}

TEST(Layout, OfRenderedCompressedPrompt) {
    WordPunctTokenizer tok;
    auto p = expert_prompt(AgentKind::TaskCompletion, short_history(), default_catalog().owned_by(AgentKind::TaskCompletion), "q",
                           {PromptMode::Compressed});
    auto layout = layout_of(p, default_catalog(), tok);
    EXPECT_EQ(layout.counts.function_slots, 13u);
    EXPECT_EQ(layout.position_indices[12], 0u);
    EXPECT_EQ(layout.position_indices[13], 1u);
    EXPECT_EQ(layout.counts.history_tokens, tok.count(short_history().render()));
    EXPECT_EQ(layout.size(), 13 + layout.counts.static_tokens + layout.counts.history_tokens);
}

TEST(Compression, CatalogSlotCounts) {
    WordPunctTokenizer tok;
    auto report = token_report(default_catalog(), tok);
    const auto* pc = report.find(AgentKind::PersonalContext);
    const auto* tc = report.find(AgentKind::TaskCompletion);
    ASSERT_TRUE(pc && tc);
    EXPECT_EQ(pc->compressed_tool_tokens, 23u);
    EXPECT_EQ(tc->compressed_tool_tokens, 13u);
    EXPECT_EQ(pc->raw_tool_tokens, 462u);
    EXPECT_EQ(tc->raw_tool_tokens, 247u);
    EXPECT_GT(pc->tool_reduction(), 0.95);
    EXPECT_GT(tc->tool_reduction(), 0.94);
    EXPECT_LT(pc->static_compressed, pc->static_full_text);
    auto table = compression_table(report);
    EXPECT_NE(table.find("# of PC Tool Tokens"), std::string::npos);
    EXPECT_NE(table.find(format_percent_delta(pc->tool_reduction())), std::string::npos);
}

TEST(Compression, FiveTenTokenToolsGiveNinetyPercent) {
    std::vector<ToolDefinition> tools;
    for (std::size_t i = 0; i < 5; ++i) tools.push_back(sized_tool(i, 10));
    auto c = measure_compression(AgentKind::PersonalContext, tools, WordPunctTokenizer{});
    EXPECT_EQ(c.raw_tool_tokens, 50u);
    EXPECT_EQ(c.compressed_tool_tokens, 5u);
    EXPECT_EQ(format_percent_delta(c.tool_reduction()), "-90.00%");
}

TEST(Compression, LongDefinitionsReachNinetyFivePercent) {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 1 + rng() % 30;
        std::vector<ToolDefinition> tools;
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t len = 4 + rng() % 60;
            tools.push_back(sized_tool(i, len));
            total += len;
        }
        auto c = measure_compression(AgentKind::TaskCompletion, tools, WordPunctTokenizer{});
        ASSERT_EQ(c.raw_tool_tokens, total);
        if (total >= 25 * n) {
            ASSERT_GE(c.tool_reduction(), 0.95);
        }
        ASSERT_GE(c.tool_reduction(), 0.0);
    }
}

TEST(Compression, EmptyToolboxHasNoReduction) {
    auto c = measure_compression(AgentKind::TaskCompletion, {}, WordPunctTokenizer{});
    EXPECT_EQ(c.tool_reduction(), 0.0);
    EXPECT_EQ(c.compressed_tool_tokens, 0u);
}

TEST(Embedding, DeterministicUnitVectors) {
    HashProjectionProvider p(1, 32);
    auto a = p.embed("send_mail(receiver, content): Send an email.");
    auto b = HashProjectionProvider(1, 32).embed("send_mail(receiver, content): Send an email.");
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), 32u);
    double norm = 0;
    for (float x : a) norm += static_cast<double>(x) * x;
    EXPECT_NEAR(norm, 1.0, 1e-5);
    EXPECT_NE(HashProjectionProvider(2, 32).embed("x y z"), HashProjectionProvider(1, 32).embed("x y z"));
    EXPECT_THROW(HashProjectionProvider(0, 0), ConfigError);
}

TEST(Embedding, CatalogToolsDoNotCollide) {
    HashProjectionProvider p;
    EmbeddingCache cache;
    auto all = default_catalog().tools();
    auto vecs = embed_tools(all, p, &cache);
    ASSERT_EQ(vecs.size(), all.size());
    EXPECT_EQ(cache.size(), all.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        for (std::size_t j = i + 1; j < vecs.size(); ++j) ASSERT_NE(vecs[i], vecs[j]) << all[i].name << " " << all[j].name;
    }
    auto again = embed_tools(all, p, &cache);
    EXPECT_EQ(again, vecs);
    EXPECT_EQ(cache.size(), all.size());
}

TEST(Fnv, KnownValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

} // namespace
} // namespace camphor
