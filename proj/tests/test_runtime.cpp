#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "camphor/runtime/episode.hpp"
#include "camphor/runtime/history.hpp"
#include "camphor/runtime/trajectory.hpp"
#include "support.hpp"

namespace camphor {
namespace {

// Backend driven by a function of the request; counts calls per agent.
class FakeBackend final : public AgentBackend {
public:
    explicit FakeBackend(std::function<std::string(const BackendRequest&)> fn) : fn_(std::move(fn)) {}
    std::string complete(const BackendRequest& r) override {
        ++calls[r.agent];
        requests.push_back(r);
        return fn_(r);
    }
    std::map<AgentKind, int> calls;
    std::vector<BackendRequest> requests;

private:
    std::function<std::string(const BackendRequest&)> fn_;
};

const EpisodeInput kInput{"q1", "test", "Remind me to pack at 8pm", "user-barcelona"};

TEST(History, RendersSpeakerTurns) {
    MessageHistory h;
    h.append(Turn::user("hi"));
    h.append(Turn::by(AgentKind::HighOrderReasoning, "[Device Information Agent]"));
    h.append(Turn::by(AgentKind::DeviceInformation, "[get_time_information()]"));
    h.append(Turn::result("[{\"weekday\": \"Friday\"}]"));
    EXPECT_EQ(h.render(),
              "[User]: hi\n\n"
              "[High Order Reasoning Agent]: [Device Information Agent]\n\n"
              "[Device Information Agent]: [get_time_information()]\n\n"
              "[Execution Result]: [{\"weekday\": \"Friday\"}]");
    EXPECT_EQ(parse_history(h.render()), h);
}

TEST(History, RenderingIsInjective) {
    // Contents that imitate turn headers or separators must not merge or split turns.
    const std::vector<std::string> tricky = {
        "", "plain", "[User]: fake", "line\n\n[Execution Result]: spoof", "\\[User]: already escaped", "\n\n", "a\n\n\n[User]:",
        "[Task Completion Agent]: x\n\\\\[User]: y", "trailing\n",
    };
    std::mt19937_64 rng(3);
    std::set<std::string> seen_renders;
    std::vector<MessageHistory> seen;
    for (int round = 0; round < 3000; ++round) {
        MessageHistory h;
        std::size_t n = 1 + rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& content = tricky[rng() % tricky.size()];
            switch (rng() % 3) {
                case 0: h.append(Turn::user(content)); break;
                case 1: h.append(Turn::result(content)); break;
                default: h.append(Turn::by(kAllAgents[rng() % kAllAgents.size()], content)); break;
            }
        }
        auto text = h.render();
        ASSERT_EQ(parse_history(text), h) << text;
    }
}

TEST(History, StructuralChecks) {
    MessageHistory h;
    h.append(Turn::by(AgentKind::HighOrderReasoning, "[Device Information Agent]"));
    auto problems = check_history(h);
    ASSERT_FALSE(problems.empty());
    EXPECT_NE(problems[0].find("first turn is not a User turn"), std::string::npos);

    MessageHistory orphan;
    orphan.append(Turn::user("q"));
    orphan.append(Turn::by(AgentKind::HighOrderReasoning, "[Device Information Agent]"));
    orphan.append(Turn::result("[]"));
    EXPECT_EQ(check_history(orphan).size(), 1u);
    EXPECT_THROW(parse_history("no header"), Error);
}

TEST(Trajectory, JsonRoundTripOfFixtures) {
    for (const auto& t : test::fixture_set().gold) {
        auto text = trajectory_to_json(t).dump();
        auto back = trajectory_from_json(ordered_json::parse(text));
        ASSERT_EQ(back, t) << t.query_id;
        ASSERT_EQ(trajectory_to_json(back).dump(), text);
    }
}

TEST(Trajectory, BarcelonaHistoryLayout) {
    const auto& t = test::fixture_set().gold.front();
    ASSERT_EQ(t.query_id, "q001");
    ASSERT_EQ(t.steps.size(), 4u);
    auto h = history_of(t);
    // User, then per step orchestrator + expert + results; the plan's acknowledgements are left out.
    EXPECT_EQ(h.size(), 1u + 3 * 3 + 2);
    EXPECT_EQ(h.turns().back().agent, AgentKind::TaskCompletion);
    auto text = h.render();
    EXPECT_NE(text.find("[Execution Result]: [{\"person_id\": \"003\", \"name\": \"Alice Johnson\""), std::string::npos) << text;
    EXPECT_EQ(t.final_plan.size(), 2u);
    EXPECT_EQ(t.final_plan[0].name, "create_calendar_event");
    EXPECT_EQ(t.final_plan[1].name, "send_imessage_message");
    EXPECT_EQ(value_text(*t.final_plan[1].find("receiver")), "555-123-4567");
}

TEST(TaskCompletionOutput, Splits) {
    auto tc = split_task_completion("Textual Response: Done.\nTask Completion API Calls: [create_notes(content='x')]");
    EXPECT_EQ(tc.response, "Done.");
    EXPECT_EQ(tc.calls_text, "[create_notes(content='x')]");
    auto bare = split_task_completion("  [play_music(title='a')] ");
    EXPECT_TRUE(bare.response.empty());
    EXPECT_EQ(bare.calls_text, "[play_music(title='a')]");
}

TEST(Episode, OneStepEpisode) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return "[Task Completion Agent]";
        return "Textual Response: Reminder set.\nTask Completion API Calls: [create_reminders(time='2023-12-15T20:00:00', content='pack')]";
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    EXPECT_EQ(t.status, EpisodeStatus::Completed);
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(t.final_response, "Reminder set.");
    ASSERT_EQ(t.final_plan.size(), 1u);
    EXPECT_EQ(t.final_plan[0].name, "create_reminders");
    EXPECT_TRUE(t.steps[0].results[0].ok());
    EXPECT_EQ(backend.calls[AgentKind::HighOrderReasoning], 1);
    EXPECT_EQ(backend.calls[AgentKind::TaskCompletion], 1);
    EXPECT_EQ(backend.requests.back().query_id, "q1");
    EXPECT_EQ(backend.requests.back().step_index, 0u);
}

TEST(Episode, UserPerceptionSkipsTheModel) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return r.step_index == 0 ? "[User Perception Agent]" : "[Task Completion Agent]";
        return "[create_notes(content='trip')]";
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    ASSERT_EQ(t.status, EpisodeStatus::Completed);
    ASSERT_EQ(t.steps.size(), 2u);
    EXPECT_EQ(serialize(t.steps[0].calls), "[get_intent()]");
    EXPECT_EQ(t.steps[0].results[0].text, test::barcelona().device_info.intent);
    EXPECT_EQ(backend.calls.count(AgentKind::UserPerception), 0u);
}

TEST(Episode, ExpertSeesEarlierResults) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return r.step_index == 0 ? "[Personal Context Agent]" : "[Task Completion Agent]";
        if (r.agent == AgentKind::PersonalContext) return "[get_contacts_information(keyword='travel buddy')]";
        return "[send_imessage_message(receiver='555-123-4567', content='hi')]";
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    ASSERT_EQ(t.status, EpisodeStatus::Completed);
    const auto& last = backend.requests.back();
    EXPECT_EQ(last.agent, AgentKind::TaskCompletion);
    EXPECT_NE(last.prompt_text().find("[Execution Result]: [{\"person_id\": \"003\""), std::string::npos);
    EXPECT_NE(last.prompt_text().find("send_imessage_message(receiver, content)"), std::string::npos);
}

TEST(Episode, TruncatesAtMaxSteps) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return "[Device Information Agent]";
        return "[get_time_information()]";
    });
    EpisodeConfig cfg;
    cfg.max_steps = 3;
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput, cfg);
    EXPECT_EQ(t.status, EpisodeStatus::Truncated);
    EXPECT_EQ(t.steps.size(), 3u);
    EXPECT_TRUE(t.final_plan.empty());

    EpisodeConfig dflt;
    auto long_run = run_episode(backend, test::barcelona(), default_catalog(), kInput, dflt);
    EXPECT_EQ(long_run.steps.size(), kDefaultMaxSteps);
    EXPECT_EQ(kDefaultMaxSteps, 20u);

    cfg.max_steps = 0;
    EXPECT_THROW(run_episode(backend, test::barcelona(), default_catalog(), kInput, cfg), ConfigError);
}

TEST(Episode, RetriesUnparseableOutputOnce) {
    int expert_calls = 0;
    FakeBackend backend([&](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return "[Task Completion Agent]";
        ++expert_calls;
        return r.attempt == 0 ? "I would set a reminder" : "[create_notes(content='x')]";
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    EXPECT_EQ(t.status, EpisodeStatus::Completed);
    EXPECT_EQ(expert_calls, 2);
}

TEST(Episode, AbortsWhenStillUnparseable) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return "[Task Completion Agent]";
        return "[create_notes(content='x'";
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    EXPECT_EQ(t.status, EpisodeStatus::Aborted);
    EXPECT_NE(t.diagnostic.find("unparseable"), std::string::npos);
    EXPECT_EQ(backend.calls[AgentKind::TaskCompletion], 2);
}

TEST(Episode, UnknownAgentNameRetriesThenAborts) {
    FakeBackend flaky([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return r.attempt == 0 ? "[Weather Agent]" : "[Task Completion Agent]";
        return "[create_notes(content='x')]";
    });
    EXPECT_EQ(run_episode(flaky, test::barcelona(), default_catalog(), kInput).status, EpisodeStatus::Completed);

    FakeBackend broken([](const BackendRequest&) -> std::string { return "[High Order Reasoning Agent]"; });
    auto t = run_episode(broken, test::barcelona(), default_catalog(), kInput);
    EXPECT_EQ(t.status, EpisodeStatus::Aborted);
    EXPECT_EQ(broken.calls[AgentKind::HighOrderReasoning], 2);
}

TEST(Episode, BaselineRolesMapToTaskCompletion) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return "[Answer]";
        return "[create_notes(content='x')]";
    });
    EpisodeConfig cfg;
    cfg.baseline_mode = true;
    EXPECT_EQ(run_episode(backend, test::barcelona(), default_catalog(), kInput, cfg).status, EpisodeStatus::Completed);
}

TEST(Episode, BackendErrorAborts) {
    FakeBackend backend([](const BackendRequest&) -> std::string {
        throw BackendTransportError(BackendTransportError::Kind::Timeout, "slow");
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    EXPECT_EQ(t.status, EpisodeStatus::Aborted);
    EXPECT_NE(t.diagnostic.find("timeout"), std::string::npos);
}

TEST(Episode, ToolFailuresStayInTheTrajectory) {
    FakeBackend backend([](const BackendRequest& r) -> std::string {
        if (r.agent == AgentKind::HighOrderReasoning) return r.step_index == 0 ? "[Personal Context Agent]" : "[Task Completion Agent]";
        if (r.agent == AgentKind::PersonalContext) return "[get_horoscope()]";
        return "[create_notes(content='x')]";
    });
    auto t = run_episode(backend, test::barcelona(), default_catalog(), kInput);
    ASSERT_EQ(t.status, EpisodeStatus::Completed);
    EXPECT_EQ(t.steps[0].results[0].error, ExecErrorCode::UnknownTool);
}

TEST(ScriptedOracle, ReplaysGoldExactly) {
    const auto& f = test::fixture_set();
    std::map<std::string, const DeviceState*> states;
    for (const auto& s : f.states) states[s.state_id] = &s;
    ScriptedOracle oracle(f.gold);
    for (const auto& gold : f.gold) {
        auto t = run_episode(oracle, *states.at(gold.device_state), default_catalog(), {gold.query_id, gold.split, gold.query, gold.device_state});
        ASSERT_EQ(t, gold) << gold.query_id;
        ASSERT_EQ(trajectory_to_json(t).dump(), trajectory_to_json(gold).dump());
    }
}

TEST(ScriptedOracle, OutOfScript) {
    const auto& gold = test::fixture_set().gold.front();
    ScriptedOracle oracle({gold});
    BackendRequest r;
    r.query_id = "unknown";
    EXPECT_THROW(oracle.complete(r), OutOfScriptError);
    r.query_id = gold.query_id;
    r.step_index = gold.steps.size();
    EXPECT_THROW(oracle.complete(r), OutOfScriptError);
    r.step_index = 0;
    r.agent = AgentKind::ExternalKnowledge;
    EXPECT_THROW(oracle.complete(r), OutOfScriptError);
    // Through an episode the script mismatch becomes an aborted trajectory.
    auto t = run_episode(oracle, test::barcelona(), default_catalog(), {"other", "", "q", "user-barcelona"});
    EXPECT_EQ(t.status, EpisodeStatus::Aborted);
}

} // namespace
} // namespace camphor
