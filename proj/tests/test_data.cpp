#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "camphor/data/dataset.hpp"
#include "camphor/data/flatten.hpp"
#include "camphor/data/validate.hpp"
#include "support.hpp"

namespace camphor {
namespace {

std::map<std::string, DeviceState> fixture_states() {
    return load_device_states(test::fixture_dir() / "device_states", default_catalog());
}

// Pair count straight from the raw JSON lines, without the trajectory types.
std::size_t count_pairs_in_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t pairs = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto doc = nlohmann::json::parse(line);
        for (const auto& step : doc["steps"]) pairs += step["agent"] == "UserPerception" ? 1 : 2;
    }
    return pairs;
}

TEST(Dataset, ReadsFixturesWithLineNumbers) {
    auto loaded = read_dataset_file(test::fixture_dir() / "gold.jsonl");
    EXPECT_TRUE(loaded.errors.empty());
    ASSERT_EQ(loaded.trajectories.size(), 50u);
    EXPECT_EQ(loaded.lines.front(), 1u);
    EXPECT_EQ(loaded.lines.back(), 50u);
}

TEST(Dataset, CollectsLineErrors) {
    auto good = trajectory_to_json(test::fixture_set().gold.front()).dump();
    auto bad_version = trajectory_to_json(test::fixture_set().gold.front());
    bad_version["format_version"] = 9;
    std::istringstream in(good + "\n\n{not json\n" + R"({"query_id":"x"})" + "\n" + bad_version.dump() + "\n" + good + "\n");
    auto loaded = read_dataset(in);
    EXPECT_EQ(loaded.trajectories.size(), 2u);
    EXPECT_EQ(loaded.lines, (std::vector<std::size_t>{1, 6}));
    ASSERT_EQ(loaded.errors.size(), 3u);
    EXPECT_EQ(loaded.errors[0].line, 3u);
    EXPECT_EQ(loaded.errors[1].line, 4u);
    EXPECT_EQ(loaded.errors[2].line, 5u);
    EXPECT_NE(loaded.errors[2].message.find("format_version"), std::string::npos);
    EXPECT_THROW(read_dataset_file(test::fixture_dir() / "absent.jsonl"), ConfigError);
}

TEST(Dataset, SaveLoadRoundTrip) {
    test::TempDir dir("dataset");
    save_dataset(dir / "x.jsonl", test::fixture_set().gold);
    EXPECT_EQ(load_dataset(dir / "x.jsonl"), test::fixture_set().gold);
    EXPECT_EQ(read_text_file(dir / "x.jsonl"), dataset_to_jsonl(test::fixture_set().gold));
}

TEST(Fixtures, BundledFilesMatchTheGenerator) {
    const auto& f = test::fixture_set();
    EXPECT_EQ(read_text_file(test::fixture_dir() / "gold.jsonl"), dataset_to_jsonl(f.gold));
    EXPECT_EQ(read_text_file(test::fixture_dir() / "pred_with_errors.jsonl"), dataset_to_jsonl(f.pred_with_errors));
    for (const auto& s : f.states) {
        EXPECT_EQ(read_text_file(test::fixture_dir() / "device_states" / (s.state_id + ".json")), device_state_to_json(s).dump(2) + "\n");
    }
    auto again = fixtures::generate(7, default_catalog());
    EXPECT_EQ(dataset_to_jsonl(again.gold), dataset_to_jsonl(f.gold));
    EXPECT_NE(dataset_to_jsonl(fixtures::generate(8, default_catalog()).gold), dataset_to_jsonl(f.gold));
}

TEST(Flatten, PairCountMatchesIndependentCount) {
    auto data = load_dataset(test::fixture_dir() / "gold.jsonl");
    auto states = fixture_states();
    auto pairs = flatten(data, state_toolbox(states, default_catalog()));
    EXPECT_EQ(pairs.size(), count_pairs_in_jsonl(test::fixture_dir() / "gold.jsonl"));
    std::size_t summed = 0;
    for (const auto& t : data) summed += pair_count(t);
    EXPECT_EQ(pairs.size(), summed);
}

TEST(Flatten, PairsFollowTheSteps) {
    const auto& t = test::fixture_set().gold.front();
    auto pairs = flatten_trajectory(t, catalog_toolbox(default_catalog()));
    ASSERT_EQ(pairs.size(), 2 * t.steps.size());
    EXPECT_EQ(pairs[0].kind, PairKind::Orchestrator);
    EXPECT_EQ(pairs[0].completion, t.steps[0].orchestrator);
    EXPECT_EQ(pairs[1].kind, PairKind::Expert);
    EXPECT_EQ(pairs[1].agent, t.steps[0].agent);
    EXPECT_EQ(pairs[1].completion, t.steps[0].completion);
    // The expert sees the orchestrator's choice; the next orchestrator sees the results.
    EXPECT_NE(pairs[1].prompt.find("[High Order Reasoning Agent]: [Device Information Agent]"), std::string::npos);
    EXPECT_NE(pairs[2].prompt.find("[Execution Result]: "), std::string::npos);
    auto last = pairs.back();
    EXPECT_EQ(last.agent, AgentKind::TaskCompletion);
    EXPECT_NE(last.prompt.find("Here are available API calls:"), std::string::npos);
    auto line = nlohmann::json::parse(pairs_to_jsonl({last}));
    EXPECT_EQ(line["kind"], "expert");
    EXPECT_EQ(line["step_index"], t.steps.size() - 1);
}

TEST(Flatten, UserPerceptionHasOnlyTheOrchestratorPair) {
    const Trajectory* with_up = nullptr;
    for (const auto& t : test::fixture_set().gold) {
        for (const auto& s : t.steps) {
            if (s.agent == AgentKind::UserPerception) with_up = &t;
        }
    }
    ASSERT_NE(with_up, nullptr);
    auto pairs = flatten_trajectory(*with_up, catalog_toolbox(default_catalog()));
    EXPECT_EQ(pairs.size(), pair_count(*with_up));
    for (const auto& p : pairs) EXPECT_NE(p.agent, AgentKind::UserPerception);
}

TEST(Flatten, UnknownStateIsAConfigError) {
    std::map<std::string, DeviceState> none;
    EXPECT_THROW(flatten(test::fixture_set().gold, state_toolbox(none, default_catalog())), ConfigError);
}

LoadedDataset loaded_of(std::vector<Trajectory> data) {
    LoadedDataset d;
    for (std::size_t i = 0; i < data.size(); ++i) d.lines.push_back(i + 1);
    d.trajectories = std::move(data);
    return d;
}

TEST(Validate, FixturesAreClean) {
    auto states = fixture_states();
    auto r = validate_dataset(read_dataset_file(test::fixture_dir() / "gold.jsonl"), {&default_catalog(), &states, true, std::nullopt});
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.warnings(), 0u);
    EXPECT_EQ(r.query_count, 50u);
    EXPECT_EQ(r.pair_count, count_pairs_in_jsonl(test::fixture_dir() / "gold.jsonl"));
    EXPECT_EQ(r.split_counts.at("train") + r.split_counts.at("test"), 50u);
}

TEST(Validate, HistoryMustStartWithUser) {
    auto t = test::fixture_set().gold.front();
    MessageHistory h = history_of(t);
    std::vector<Turn> turns(h.turns().begin() + 1, h.turns().end());
    t.recorded_history = MessageHistory(turns);
    auto r = validate_dataset(loaded_of({t}), {});
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(r.mentions("first turn is not a User turn"));
}

TEST(Validate, RecordedHistoryDriftIsAWarning) {
    auto t = test::fixture_set().gold.front();
    MessageHistory h = history_of(t);
    h.append(Turn::user("one more thing"));
    t.recorded_history = h;
    auto r = validate_dataset(loaded_of({t}), {});
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.warnings(), 1u);
    t.recorded_history = history_of(t);
    EXPECT_EQ(validate_dataset(loaded_of({t}), {}).issues.size(), 0u);
}

TEST(Validate, StructuralProblems) {
    auto base = test::fixture_set().gold.front();
    auto dup = base;
    auto other_split = base;
    other_split.split = base.split == "train" ? "test" : "train";
    auto r = validate_dataset(loaded_of({base, dup}), {});
    EXPECT_TRUE(r.mentions("duplicate query id"));
    r = validate_dataset(loaded_of({base, other_split}), {});
    EXPECT_TRUE(r.mentions("splits"));

    auto early_tc = base;
    std::swap(early_tc.steps.front(), early_tc.steps.back());
    EXPECT_TRUE(validate_dataset(loaded_of({early_tc}), {}).mentions("TaskCompletion before the last step"));

    auto drift = base;
    drift.final_plan.pop_back();
    EXPECT_TRUE(validate_dataset(loaded_of({drift}), {}).mentions("final_plan differs"));

    auto lost = base;
    lost.steps[0].results.clear();
    auto lr = validate_dataset(loaded_of({lost}), {});
    ASSERT_FALSE(lr.ok());
    EXPECT_EQ(lr.issues[0].line, 1u);
    EXPECT_EQ(lr.issues[0].query_id, base.query_id);

    std::map<std::string, DeviceState> no_states;
    EXPECT_TRUE(validate_dataset(loaded_of({base}), {nullptr, &no_states, true, std::nullopt}).mentions("unknown device state"));
}

TEST(Validate, AliasIsAWarningUnknownToolAnError) {
    auto t = test::fixture_set().gold.front();
    t.final_plan.back().name = "send_message";
    t.steps.back().calls = t.final_plan;
    auto r = validate_dataset(loaded_of({t}), {&default_catalog(), nullptr, true, std::nullopt});
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.warnings(), 1u);
    EXPECT_TRUE(r.mentions("known alias of send_imessage_message"));
    t.final_plan.back().name = "send_pigeon";
    t.steps.back().calls = t.final_plan;
    EXPECT_FALSE(validate_dataset(loaded_of({t}), {&default_catalog(), nullptr, true, std::nullopt}).ok());
}

TEST(Validate, ReleasedCountsAreCheckedWhenAsked) {
    ValidateOptions opts;
    opts.expect_released = ReleasedCounts{};
    auto r = validate_dataset(read_dataset_file(test::fixture_dir() / "gold.jsonl"), opts);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(r.mentions("query count: expected 3410"));
    EXPECT_TRUE(r.mentions("flattened pairs: expected 35444"));
    ReleasedCounts mine{r.query_count, r.split_counts["train"], r.split_counts["test"], r.pair_count, r.mean_pairs(), 0.01};
    opts.expect_released = mine;
    EXPECT_TRUE(validate_dataset(read_dataset_file(test::fixture_dir() / "gold.jsonl"), opts).ok());
}

TEST(Validate, SchemaErrorsAreReported) {
    std::istringstream in("{}\n");
    auto r = validate_dataset(read_dataset(in), {});
    ASSERT_EQ(r.errors(), 1u);
    EXPECT_EQ(r.issues[0].line, 1u);
    EXPECT_EQ(dataset_report_to_json(r)["errors"], 1);
}

} // namespace
} // namespace camphor
