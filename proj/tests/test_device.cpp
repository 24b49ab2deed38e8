#include <gtest/gtest.h>

#include "camphor/device/simulator.hpp"
#include "camphor/device/state.hpp"
#include "camphor/device/timestamp.hpp"
#include "support.hpp"

namespace camphor {
namespace {

using test::call;

std::int64_t epoch(Timestamp t) { return t.time_since_epoch().count(); }

TEST(Timestamp, ParsesAndFormats) {
    auto t = parse_timestamp("2024-01-07T07:00:00");
    ASSERT_TRUE(t);
    EXPECT_EQ(epoch(*t), 1704610800);
    EXPECT_EQ(format_timestamp(*t), "2024-01-07T07:00:00");
    EXPECT_EQ(parse_timestamp("2024-01-07T07:00"), t);
    EXPECT_EQ(parse_timestamp("2024-01-07T07:00:00Z"), t);
    EXPECT_EQ(epoch(*parse_timestamp("2024-01-07")), 1704585600);
    EXPECT_FALSE(parse_timestamp("2024-02-30"));
    EXPECT_FALSE(parse_timestamp("2024-01-07T25:00:00"));
    EXPECT_FALSE(parse_timestamp("next tuesday"));
}

TEST(TimeRange, NextMonthFromMidDecember) {
    auto clock = *parse_timestamp("2023-12-15T09:30:00");
    auto r = resolve_time_range("next month", clock);
    EXPECT_EQ(epoch(r.start), 1704067200); // 2024-01-01
    EXPECT_EQ(epoch(r.end), 1706745600);   // 2024-02-01
    EXPECT_TRUE(r.contains(*parse_timestamp("2024-01-31T23:59:59")));
    EXPECT_FALSE(r.contains(r.end));
}

TEST(TimeRange, RelativeVocabulary) {
    auto clock = *parse_timestamp("2023-12-15T09:30:00"); // a Friday
    auto day = [](const char* d) { return *parse_timestamp(d); };
    EXPECT_EQ(resolve_time_range("today", clock), (TimeInterval{day("2023-12-15"), day("2023-12-16")}));
    EXPECT_EQ(resolve_time_range("Tomorrow", clock), (TimeInterval{day("2023-12-16"), day("2023-12-17")}));
    EXPECT_EQ(resolve_time_range("yesterday", clock), (TimeInterval{day("2023-12-14"), day("2023-12-15")}));
    EXPECT_EQ(resolve_time_range("this week", clock), (TimeInterval{day("2023-12-11"), day("2023-12-18")}));
    EXPECT_EQ(resolve_time_range("next week", clock), (TimeInterval{day("2023-12-18"), day("2023-12-25")}));
    EXPECT_EQ(resolve_time_range("last week", clock), (TimeInterval{day("2023-12-04"), day("2023-12-11")}));
    EXPECT_EQ(resolve_time_range("last month", clock), (TimeInterval{day("2023-11-01"), day("2023-12-01")}));
    EXPECT_EQ(resolve_time_range("this year", clock), (TimeInterval{day("2023-01-01"), day("2024-01-01")}));
    EXPECT_EQ(resolve_time_range("next year", clock), (TimeInterval{day("2024-01-01"), day("2025-01-01")}));
    EXPECT_EQ(resolve_time_range("2024-01-07", clock), (TimeInterval{day("2024-01-07"), day("2024-01-08")}));
    EXPECT_EQ(resolve_time_range("2024-01-01/2024-01-08", clock), (TimeInterval{day("2024-01-01"), day("2024-01-08")}));
    EXPECT_THROW(resolve_time_range("the week after the holidays", clock), UnparseableTimeRange);
    EXPECT_THROW(resolve_time_range("2024-01-08/2024-01-01", clock), UnparseableTimeRange);
}

TEST(DeviceState, JsonRoundTrip) {
    const auto& s = test::barcelona();
    auto doc = device_state_to_json(s);
    auto back = device_state_from_json(ordered_json::parse(doc.dump()), default_catalog());
    EXPECT_EQ(device_state_to_json(back).dump(), doc.dump());
    EXPECT_EQ(back.store("contacts").size(), 4u);
    EXPECT_TRUE(back.store("no_such_app").empty());
}

TEST(DeviceState, RejectsBrokenDocuments) {
    auto doc = device_state_to_json(test::barcelona());
    auto bad_clock = doc;
    bad_clock["device_info"]["clock"] = "soon";
    EXPECT_THROW(device_state_from_json(bad_clock, default_catalog()), DeviceStateError);
    auto bad_tool = doc;
    bad_tool["installed_tools"].push_back("teleport");
    try {
        device_state_from_json(bad_tool, default_catalog());
        FAIL();
    } catch (const DeviceStateError& e) {
        ASSERT_EQ(e.problems().size(), 1u);
        EXPECT_NE(e.problems()[0].find("teleport"), std::string::npos);
    }
    auto dup = doc;
    dup["apps"]["contacts"].push_back(dup["apps"]["contacts"][0]);
    EXPECT_THROW(device_state_from_json(dup, default_catalog()), DeviceStateError);
    auto missing = doc;
    missing.erase("state_id");
    EXPECT_THROW(device_state_from_json(missing, default_catalog()), DeviceStateError);
}

TEST(DeviceState, LoadsFixtureDirectory) {
    auto states = load_device_states(test::fixture_dir() / "device_states", default_catalog());
    EXPECT_EQ(states.size(), 5u);
    ASSERT_TRUE(states.count("user-barcelona"));
    EXPECT_EQ(device_state_to_json(states.at("user-barcelona")).dump(), device_state_to_json(test::barcelona()).dump());
    EXPECT_THROW(load_device_states(test::fixture_dir() / "nope", default_catalog()), ConfigError);
}

TEST(Simulator, KeywordSearchFindsTravelBuddy) {
    auto r = execute_call(test::barcelona(), default_catalog(), call("get_contacts_information", {{"keyword", std::string("travel buddy")}}));
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].fields.at("name"), "Alice Johnson");
    EXPECT_EQ(r.records[0].fields.at("phone_number"), "555-123-4567");
}

TEST(Simulator, EmptyKeywordReturnsWholeStore) {
    auto r = execute_call(test::barcelona(), default_catalog(), call("get_contacts_information"));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.records.size(), 4u);
    auto none = execute_call(test::barcelona(), default_catalog(), call("get_contacts_information", {{"keyword", std::string("zebra")}}));
    EXPECT_TRUE(none.records.empty());
    EXPECT_EQ(render_result(none), "[]");
}

TEST(Simulator, TimeRangeFilter) {
    const auto& s = test::barcelona();
    auto hit = execute_call(s, default_catalog(), call("get_calendar_event", {{"time_range", std::string("next week")}}));
    ASSERT_TRUE(hit.ok());
    EXPECT_EQ(hit.records.size(), 1u);
    auto miss = execute_call(s, default_catalog(), call("get_calendar_event", {{"time_range", std::string("next month")}}));
    EXPECT_TRUE(miss.records.empty());
    auto bad = execute_call(s, default_catalog(), call("get_calendar_event", {{"time_range", std::string("whenever")}}));
    EXPECT_FALSE(bad.ok());
    EXPECT_EQ(bad.error, ExecErrorCode::BadArgument);
}

TEST(Simulator, DeviceInformationAndSearch) {
    const auto& s = test::barcelona();
    auto loc = execute_call(s, default_catalog(), call("get_location_information"));
    ASSERT_EQ(loc.records.size(), 1u);
    EXPECT_EQ(loc.records[0].fields.at("city"), "Dublin");
    auto time = execute_call(s, default_catalog(), call("get_time_information"));
    EXPECT_EQ(time.records[0].fields.at("weekday"), "Friday");
    auto intent = execute_call(s, default_catalog(), call("get_intent"));
    EXPECT_EQ(intent.text, s.device_info.intent);
    auto search = execute_call(s, default_catalog(), call("search_safari", {{"query", std::string("Cheapest flights from Dublin to Barcelona January 2024")}}));
    EXPECT_NE(search.text.find("€29.99"), std::string::npos);
    auto nothing = execute_call(s, default_catalog(), call("search_safari", {{"query", std::string("zzz")}}));
    EXPECT_EQ(nothing.text, kNoResultText);
}

TEST(Simulator, FailuresAreInBand) {
    const auto& s = test::barcelona();
    EXPECT_EQ(execute_call(s, default_catalog(), call("teleport")).error, ExecErrorCode::UnknownTool);
    EXPECT_EQ(execute_call(s, default_catalog(), call("send_mail", {{"receiver", std::string("a")}})).error, ExecErrorCode::BadArgument);
    EXPECT_EQ(execute_call(s, default_catalog(), call("create_notes", {{"content", std::string("a")}, {"colour", std::string("red")}})).error,
              ExecErrorCode::BadArgument);
    EXPECT_EQ(execute_call(s, default_catalog(), call("create_reminders", {{"time", std::string("noon")}, {"content", std::string("a")}})).error,
              ExecErrorCode::BadArgument);

    DeviceState bare = s;
    bare.installed_tools.clear();
    auto r = execute_call(bare, default_catalog(), call("play_music", {{"title", std::string("x")}}));
    EXPECT_EQ(r.error, ExecErrorCode::ToolNotInstalled);
    EXPECT_EQ(render_result(r).rfind("[Error: ToolNotInstalled: ", 0), 0u) << render_result(r);
    // Static tools need no installation.
    EXPECT_TRUE(execute_call(bare, default_catalog(), call("get_location_information")).ok());
}

TEST(Simulator, EffectsLogIsPerEpisodeAndReadsAreDeterministic) {
    const auto& s = test::barcelona();
    Simulator a(s, default_catalog());
    Simulator b(s, default_catalog());
    a.execute(call("create_notes", {{"content", std::string("pack bags")}}));
    auto first = a.execute(call("get_contacts_information", {{"keyword", std::string("Kelly")}}));
    auto second = b.execute(call("get_contacts_information", {{"keyword", std::string("Kelly")}}));
    EXPECT_EQ(first, second);
    EXPECT_EQ(a.effects().size(), 1u);
    EXPECT_TRUE(b.effects().empty());
    EXPECT_EQ(a.call_log().size(), 2u);
    EXPECT_EQ(s.store("notes").size(), test::barcelona().store("notes").size());
}

TEST(Simulator, ResultRenderingUsesPythonSeparators) {
    Record r;
    r.id = "1";
    r.app = "contacts";
    r.fields = ordered_json::parse(R"({"name":"Alice","n":3,"tags":["a","b"]})");
    auto res = ExecutionResult::of_records(call("get_contacts_information"), {r, r});
    EXPECT_EQ(render_result(res), R"([{"name": "Alice", "n": 3, "tags": ["a", "b"]}, {"name": "Alice", "n": 3, "tags": ["a", "b"]}])");
}

} // namespace
} // namespace camphor
