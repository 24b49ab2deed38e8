#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "camphor/data/dataset.hpp"
#include "camphor/device/simulator.hpp"
#include "camphor/device/state.hpp"
#include "camphor/retrieval/recall.hpp"
#include "camphor/runtime/episode.hpp"
#include "camphor/runtime/trajectory.hpp"

namespace camphor {

/*
 * Synthetic data sets: device states, gold trajectories built by executing scripted
 * plans against those states, a prediction file with planted errors, and an
 * adversarial retrieval set. Everything derives from one seed.
 */
namespace fixtures {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <class T>
const T& pick_from(Rng& rng, const std::vector<T>& v) {
    return v[pick(rng, v.size())];
}

template <class T>
void shuffle(Rng& rng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

inline std::string pad3(std::size_t n) {
    std::string s = std::to_string(n);
    return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

inline std::string first_name(const std::string& full) { return full.substr(0, full.find(' ')); }

inline Timestamp at_day(Timestamp clock, int day_offset, int hour, int minute = 0) {
    return std::chrono::floor<std::chrono::days>(clock) + std::chrono::days{day_offset} + std::chrono::hours{hour} +
           std::chrono::minutes{minute};
}

inline Record make_record(std::string app, std::string id, ordered_json fields, std::optional<Timestamp> ts = {}) {
    Record r;
    r.id = std::move(id);
    r.app = std::move(app);
    r.fields = std::move(fields);
    if (ts) r.timestamp = format_timestamp(*ts);
    return r;
}

inline ordered_json contact_fields(const std::string& id, const std::string& name, const std::string& phone, const std::string& relationship,
                                   bool self = false) {
    return {{"person_id", id}, {"name", name}, {"phone_number", phone}, {"relationship", relationship}, {"is_self", self ? "True" : "False"}};
}

struct Person {
    std::string name;
    std::string relationship;
};

inline const std::vector<Person>& people() {
    static const std::vector<Person> v = {
        {"Brian Smith", "Brother"},     {"Carla Gomez", "Manager"},      {"David Lee", "Dentist"},
        {"Emma Brown", "Sister"},       {"Farah Khan", "Colleague"},     {"George Miller", "Landlord"},
        {"Hannah Wright", "Best Friend"}, {"Ivan Petrov", "Tennis Coach"}, {"Julia Rossi", "Mother"},
        {"Kenji Sato", "Neighbor"},     {"Laura Chen", "Doctor"},        {"Marco Bianchi", "Father"},
    };
    return v;
}

struct Themed {
    std::string title;
    std::string detail;
};

inline const std::vector<std::string>& playlists() {
    static const std::vector<std::string> v = {"Morning Run", "Deep Focus", "Road Trip", "Sunday Jazz", "Workout Mix", "Rainy Day"};
    return v;
}

inline const std::vector<Themed>& podcasts() {
    static const std::vector<Themed> v = {
        {"Planet Money: The Price of Eggs", "economics"}, {"Hard Fork: Chips and Chatbots", "technology"},
        {"Radiolab: The Ocean Floor", "science"},         {"The Daily: Election Night", "news"},
        {"Huberman Lab: Sleep Better", "health"},         {"Freakonomics: Tipping Points", "economics"},
    };
    return v;
}

inline const std::vector<Themed>& meetings() {
    static const std::vector<Themed> v = {
        {"Budget review", "budget"}, {"Quarterly planning", "planning"}, {"Design sync", "design"},
        {"Dentist appointment", "dentist"}, {"Team lunch", "lunch"}, {"Yoga class", "yoga"},
    };
    return v;
}

inline const std::vector<Themed>& notes() {
    static const std::vector<Themed> v = {
        {"Packing list", "Passport, charger, sunscreen, hiking boots"},
        {"Gift ideas", "Scarf for Mom, board game for Brian, plant for the office"},
        {"Sourdough recipe", "500g flour, 350g water, 100g starter, 10g salt"},
        {"Book club picks", "The Overstory, Piranesi, Klara and the Sun"},
        {"Garden plan", "Tomatoes by the fence, basil in pots, water every morning"},
    };
    return v;
}

inline const std::vector<Themed>& places() {
    static const std::vector<Themed> v = {
        {"Blue Bottle Coffee", "coffee"}, {"Central Library", "library"}, {"Riverside Park", "park"},
        {"Golden Dragon Restaurant", "restaurant"}, {"City Climbing Gym", "gym"},
    };
    return v;
}

inline const std::vector<Themed>& orders() {
    static const std::vector<Themed> v = {
        {"Ethiopian coffee beans 1kg", "coffee"}, {"Noise cancelling headphones", "headphones"},
        {"Trail running shoes", "shoes"},         {"Cast iron skillet", "skillet"},
        {"Yoga mat", "yoga"},
    };
    return v;
}

// World-knowledge answers for "best app for <need>" searches.
struct AppAnswer {
    std::string need;
    std::string app;
};

inline const std::vector<AppAnswer>& app_answers() {
    static const std::vector<AppAnswer> v = {
        {"meditation", "Headspace"}, {"language learning", "Duolingo"}, {"budgeting", "YNAB"},
        {"photo editing", "Snapseed"}, {"bird identification", "Merlin Bird ID"},
    };
    return v;
}

struct Intent {
    std::string text;
    std::string item;
};

inline const std::vector<Intent>& intents() {
    static const std::vector<Intent> v = {
        {"The user is reading a recipe and wants to buy a cast iron skillet.", "cast iron skillet"},
        {"The user is looking at running routes and wants new trail running shoes.", "trail running shoes"},
        {"The user is viewing a coffee blog and wants to reorder coffee beans.", "coffee beans"},
        {"The user is planning a commute and wants noise cancelling headphones.", "noise cancelling headphones"},
    };
    return v;
}

inline const std::vector<std::string>& screens() {
    static const std::vector<std::string> v = {
        "A web article titled 'Ten Tips for Better Sleep' with a list of evening habits.",
        "A recipe page for lemon garlic pasta with ingredients and steps.",
        "A flight confirmation email for a trip to Lisbon on March 22.",
        "A shopping list in a notes app: eggs, spinach, oat milk, lemons.",
    };
    return v;
}

inline std::set<std::string> all_tools_of(const ToolCatalog& catalog, AgentKind agent) {
    std::set<std::string> out;
    for (const auto& t : catalog.owned_by(agent)) out.insert(t.name);
    return out;
}

inline void install_all(DeviceState& s, const ToolCatalog& catalog) {
    for (auto agent : {AgentKind::PersonalContext, AgentKind::TaskCompletion}) {
        for (const auto& n : all_tools_of(catalog, agent)) s.installed_tools.insert(n);
    }
}

// The appendix trip: a user in Dublin asking for flights to Barcelona in December 2023.
inline DeviceState barcelona_state(const ToolCatalog& catalog) {
    DeviceState s;
    s.state_id = "user-barcelona";
    s.device_info.location = {{"latitude", 53.3478},
                              {"longitude", -6.2597},
                              {"city", "Dublin"},
                              {"country", "Ireland"},
                              {"postal_code", "D01 V902"},
                              {"formatted_address", "Ryanair Head Office, Airside Business Park, Swords, Co. Dublin, Ireland"}};
    s.device_info.clock = "2023-12-15T09:30:00";
    s.device_info.screen = "The home screen with a weather widget showing 7 degrees and light rain in Dublin.";
    s.device_info.intent = "The user is planning a trip to Barcelona with a friend.";
    auto& contacts = s.app_stores["contacts"];
    contacts.push_back(make_record("contacts", "001", contact_fields("001", "Sean Murphy", "555-010-2233", "Self", true)));
    contacts.push_back(make_record("contacts", "002", contact_fields("002", "Niamh Kelly", "555-987-6543", "Sister")));
    contacts.push_back(make_record("contacts", "003", contact_fields("003", "Alice Johnson", "555-123-4567", "Travel Buddy")));
    contacts.push_back(make_record("contacts", "004", contact_fields("004", "Tom Byrne", "555-222-7788", "Manager")));
    auto clock = *parse_timestamp(s.device_info.clock);
    s.app_stores["calendar"].push_back(
        make_record("calendar", "c1", {{"event_title", "Team standup"}, {"location", "Office"}}, at_day(clock, 3, 9)));
    s.world_knowledge.push_back({"cheapest flights dublin barcelona january 2024",
                                 "Cheapest flights from Dublin to Barcelona in January 2024:\n"
                                 "- Tuesday, January 7th: €29.99, Departure at 7:00 AM, Arrival at 10:30 AM.\n"
                                 "- Thursday, January 16th: €32.50, Departure at 6:45 AM, Arrival at 10:15 AM.\n"
                                 "- Friday, January 10th: €31.00, Departure at 8:00 AM, Arrival at 11:30 AM."});
    s.world_knowledge.push_back({"weather barcelona january", "Barcelona in January: average high 14°C, low 5°C, mostly sunny."});
    install_all(s, catalog);
    return s;
}

inline DeviceState synthetic_state(const std::string& id, const std::string& clock_text, Rng& rng, const ToolCatalog& catalog) {
    DeviceState s;
    s.state_id = id;
    s.device_info.clock = clock_text;
    const auto clock = *parse_timestamp(clock_text);
    static const std::vector<ordered_json> locations = {
        {{"latitude", 37.7793}, {"longitude", -122.4193}, {"city", "San Francisco"}, {"country", "United States"}},
        {{"latitude", 51.5072}, {"longitude", -0.1276}, {"city", "London"}, {"country", "United Kingdom"}},
        {{"latitude", 52.52}, {"longitude", 13.405}, {"city", "Berlin"}, {"country", "Germany"}},
        {{"latitude", 35.6762}, {"longitude", 139.6503}, {"city", "Tokyo"}, {"country", "Japan"}},
    };
    s.device_info.location = pick_from(rng, locations);
    s.device_info.screen = pick_from(rng, screens());
    s.device_info.intent = pick_from(rng, intents()).text;

    auto roster = people();
    shuffle(rng, roster);
    auto& contacts = s.app_stores["contacts"];
    contacts.push_back(make_record("contacts", "001", contact_fields("001", "Pat Taylor", "555-000-0001", "Self", true)));
    for (std::size_t i = 0; i < 6; ++i) {
        std::string pid = pad3(i + 2);
        std::string phone = "555-" + pad3(100 + pick(rng, 900)) + "-" + std::to_string(1000 + pick(rng, 9000));
        contacts.push_back(make_record("contacts", pid, contact_fields(pid, roster[i].name, phone, roster[i].relationship)));
        s.app_stores["mail"].push_back(make_record("mail", "m" + std::to_string(i + 1),
                                                   {{"from", roster[i].name}, {"address", first_name(roster[i].name) + "@example.com"},
                                                    {"subject", "Catching up"}},
                                                   at_day(clock, -static_cast<int>(i) - 1, 18)));
    }
    for (std::size_t i = 0; i < playlists().size(); ++i) {
        s.app_stores["music"].push_back(
            make_record("music", "p" + std::to_string(i + 1), {{"playlist", playlists()[i]}, {"songs", static_cast<int>(10 + pick(rng, 40))}}));
    }
    for (std::size_t i = 0; i < podcasts().size(); ++i) {
        s.app_stores["podcasts"].push_back(make_record("podcasts", "e" + std::to_string(i + 1),
                                                       {{"title", podcasts()[i].title}, {"topic", podcasts()[i].detail}},
                                                       at_day(clock, -static_cast<int>(pick(rng, 10)) - 1, 7)));
    }
    // Meetings spread over this week and next, none on the clock's own hour.
    for (std::size_t i = 0; i < meetings().size(); ++i) {
        int offset = static_cast<int>(pick(rng, 3)) + 1 + (i % 2 ? 7 : 0);
        s.app_stores["calendar"].push_back(make_record("calendar", "c" + std::to_string(i + 1),
                                                       {{"event_title", meetings()[i].title}, {"theme", meetings()[i].detail}},
                                                       at_day(clock, offset, 10 + static_cast<int>(i))));
    }
    for (std::size_t i = 0; i < notes().size(); ++i) {
        s.app_stores["notes"].push_back(make_record("notes", "n" + std::to_string(i + 1),
                                                    {{"title", notes()[i].title}, {"content", notes()[i].detail}},
                                                    at_day(clock, -static_cast<int>(i), 8)));
    }
    for (std::size_t i = 0; i < places().size(); ++i) {
        s.app_stores["maps"].push_back(
            make_record("maps", "pl" + std::to_string(i + 1), {{"name", places()[i].title}, {"category", places()[i].detail}}));
    }
    for (std::size_t i = 0; i < orders().size(); ++i) {
        s.app_stores["amazon_orders"].push_back(make_record("amazon_orders", "o" + std::to_string(i + 1),
                                                            {{"item", orders()[i].title}, {"status", i % 2 ? "Delivered" : "Shipped"}},
                                                            at_day(clock, -static_cast<int>(3 * i) - 2, 12)));
    }
    for (const auto& a : app_answers()) {
        s.world_knowledge.push_back({"best app for " + a.need, "Top rated " + a.need + " app this year: " + a.app + "."});
    }
    install_all(s, catalog);
    // A couple of tools no template needs stay uninstalled, so toolboxes differ per device.
    std::vector<std::string> optional = {"get_health_records", "get_fitness_summary", "get_books_library", "get_voice_recording",
                                         "get_settings_cellular", "get_instagram_information"};
    shuffle(rng, optional);
    for (std::size_t i = 0; i < 2; ++i) s.installed_tools.erase(optional[i]);
    return s;
}

// Records a gold trajectory by executing each scripted completion on the device.
class GoldBuilder {
public:
    GoldBuilder(const DeviceState& state, const ToolCatalog& catalog, std::string query_id, std::string split, std::string query)
        : state_(&state), catalog_(&catalog) {
        t_.query_id = std::move(query_id);
        t_.split = std::move(split);
        t_.query = std::move(query);
        t_.device_state = state.state_id;
    }

    // Returns a copy: later steps may reallocate the step list.
    std::vector<ExecutionResult> step(AgentKind agent, std::string completion) {
        Step s;
        s.agent = agent;
        s.orchestrator = agent_choice_text(agent);
        s.completion = std::move(completion);
        std::string calls_text = s.completion;
        if (agent == AgentKind::TaskCompletion) {
            auto tc = split_task_completion(s.completion);
            calls_text = tc.calls_text;
            t_.final_response = tc.response;
        }
        s.calls = parse_call_list(calls_text);
        for (const auto& c : s.calls) {
            auto r = execute_call(*state_, *catalog_, c);
            if (!r.ok()) throw Error("fixture " + t_.query_id + ": " + r.text);
            s.results.push_back(std::move(r));
        }
        if (agent == AgentKind::TaskCompletion) t_.final_plan = s.calls;
        t_.steps.push_back(std::move(s));
        return t_.steps.back().results;
    }

    std::vector<ExecutionResult> call(AgentKind agent, std::vector<FunctionCall> calls) {
        return step(agent, serialize(calls));
    }

    std::vector<ExecutionResult> intent() { return step(AgentKind::UserPerception, serialize(std::vector<FunctionCall>{{"get_intent", {}}})); }

    Trajectory finish() {
        if (t_.steps.empty() || t_.steps.back().agent != AgentKind::TaskCompletion) throw Error("fixture " + t_.query_id + " lacks a plan");
        t_.status = EpisodeStatus::Completed;
        return std::move(t_);
    }

private:
    const DeviceState* state_;
    const ToolCatalog* catalog_;
    Trajectory t_;
};

inline FunctionCall fc(std::string name, std::vector<Argument> args = {}) { return FunctionCall{std::move(name), std::move(args)}; }

inline std::string field(const ExecutionResult& r, std::size_t i, const std::string& key) {
    if (i >= r.records.size()) throw Error("fixture expected a record from " + serialize(r.source_call));
    return r.records[i].fields.at(key).get<std::string>();
}

// The appendix trajectory, completions as printed there.
inline Trajectory barcelona_trajectory(const DeviceState& state, const ToolCatalog& catalog, const std::string& query_id, const std::string& split) {
    GoldBuilder b(state, catalog, query_id, split,
                  "Can you show me the cheapest flight options to Barcelona next month and add it to my calendar? Also, let my travel "
                  "buddy know about our trip plan.");
    b.step(AgentKind::DeviceInformation, "['get_location_information()']");
    b.step(AgentKind::PersonalContext, "[\"get_contacts_information(keyword='travel buddy')\"]");
    b.step(AgentKind::ExternalKnowledge, "[search_safari(query='Cheapest flights from Dublin to Barcelona January 2024')]");
    b.step(AgentKind::TaskCompletion,
           "Textual Response:\n"
           "Sure! Here are some of the cheapest flight options to Barcelona next month from various sources:\n"
           "From Ryanair:\n"
           "1. Tuesday, January 7th at 7:00 AM, arriving at 10:30 AM - €29.99.\n"
           "2. Thursday, January 16th at 6:45 AM, arriving at 10:15 AM - €32.50.\n"
           "3. Friday, January 10th at 8:00 AM, arriving at 11:30 AM - €31.00.\n"
           "I will add the cheapest flight, which departs on January 7th at 7:00 AM and costs €29.99, to your calendar and notify your "
           "travel buddy.\n\n"
           "Task Completion API Calls:\n"
           "[\"create_calendar_event(time='2024-01-07T07:00:00', event_title='Flight to Barcelona - Departure from Dublin at 7:00 AM')\", "
           "\"send_imessage_message(receiver='555-123-4567', content='We have a flight to Barcelona on January 7th at 7:00 AM. Please be "
           "ready!')\"]");
    return b.finish();
}

inline const Record& contact_by_relationship(const DeviceState& s, std::size_t n) {
    // n-th non-self contact
    std::size_t seen = 0;
    for (const auto& r : s.store("contacts")) {
        if (r.fields.at("is_self") == "True") continue;
        if (seen++ == n) return r;
    }
    throw Error("fixture state has too few contacts");
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// One synthetic query per template, cycling through the templates.
inline Trajectory synthetic_trajectory(std::size_t template_index, const DeviceState& s, const ToolCatalog& catalog, const std::string& qid,
                                       const std::string& split, Rng& rng) {
    using A = AgentKind;
    const Timestamp clock = s.clock();
    const std::size_t contact_n = pick(rng, 6);
    const Record& person = contact_by_relationship(s, contact_n);
    const std::string name = person.fields.at("name").get<std::string>();
    const std::string rel = lower(person.fields.at("relationship").get<std::string>());

    switch (template_index % 14) {
        case 0: {
            GoldBuilder b(s, catalog, qid, split, "Text " + first_name(name) + " that I'm running ten minutes late.");
            const auto& r = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", first_name(name)}})});
            b.call(A::TaskCompletion,
                   {fc("send_imessage_message", {{"receiver", field(r[0], 0, "phone_number")}, {"content", "I'm running ten minutes late."}})});
            return b.finish();
        }
        case 1: {
            static const std::vector<std::string> tasks = {"water the plants", "call the bank", "pick up the dry cleaning", "renew my passport"};
            const std::string& task = pick_from(rng, tasks);
            GoldBuilder b(s, catalog, qid, split, "Remind me to " + task + " tomorrow at 9am.");
            b.call(A::DeviceInformation, {fc("get_time_information")});
            b.call(A::TaskCompletion, {fc("create_reminders", {{"time", format_timestamp(at_day(clock, 1, 9))}, {"content", task}})});
            return b.finish();
        }
        case 2: {
            const std::string& pl = pick_from(rng, playlists());
            GoldBuilder b(s, catalog, qid, split, "Put on my " + pl + " playlist.");
            const auto& r = b.call(A::PersonalContext, {fc("get_music_playlist", {{"keyword", pl}})});
            b.call(A::TaskCompletion, {fc("play_music", {{"title", field(r[0], 0, "playlist")}})});
            return b.finish();
        }
        case 3: {
            GoldBuilder b(s, catalog, qid, split, "Call my " + rel + ".");
            const auto& r = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", rel}})});
            b.call(A::TaskCompletion, {fc("call_contacts", {{"person", field(r[0], 0, "name")}})});
            return b.finish();
        }
        case 4: {
            GoldBuilder b(s, catalog, qid, split, "Save what's on my screen as a note.");
            const auto& r = b.call(A::DeviceInformation, {fc("get_screen_information")});
            b.call(A::TaskCompletion, {fc("create_notes", {{"content", r[0].text}})});
            return b.finish();
        }
        case 5: {
            GoldBuilder b(s, catalog, qid, split, "Can you help me with this?");
            const auto& r = b.intent();
            std::string item;
            for (const auto& in : intents()) {
                if (in.text == r[0].text) item = in.item;
            }
            const auto& orders_found = b.call(A::PersonalContext, {fc("get_amazon_orders", {{"keyword", item.substr(item.rfind(' ') + 1)}})});
            std::string name_shown = orders_found[0].records.empty() ? item : field(orders_found[0], 0, "item");
            b.call(A::TaskCompletion, {fc("show_amazon_item", {{"name", name_shown}})});
            return b.finish();
        }
        case 6: {
            const Themed& m = pick_from(rng, meetings());
            GoldBuilder b(s, catalog, qid, split, "Cancel my " + lower(m.title) + " coming up in the next two weeks.");
            b.call(A::DeviceInformation, {fc("get_time_information")});
            const auto& r = b.call(A::PersonalContext, {fc("get_calendar_event", {{"theme", m.detail}})});
            b.call(A::TaskCompletion, {fc("cancel_calendar_event", {{"event_title", field(r[0], 0, "event_title")}})});
            return b.finish();
        }
        case 7: {
            const Themed& p = pick_from(rng, places());
            GoldBuilder b(s, catalog, qid, split, "Show me " + p.title + " on the map.");
            b.call(A::TaskCompletion, {fc("show_maps_place", {{"name", p.title}})});
            return b.finish();
        }
        case 8: {
            const Record& other = contact_by_relationship(s, (contact_n + 1) % 6);
            const std::string other_name = other.fields.at("name").get<std::string>();
            GoldBuilder b(s, catalog, qid, split,
                          "Email " + first_name(name) + " and text " + first_name(other_name) + " that dinner is moved to Friday.");
            const auto& r1 = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", first_name(name)}})});
            std::string mail_to = first_name(field(r1[0], 0, "name")) + "@example.com";
            const auto& r2 = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", first_name(other_name)}})});
            std::string phone = field(r2[0], 0, "phone_number");
            b.call(A::TaskCompletion, {fc("send_mail", {{"receiver", mail_to}, {"content", "Dinner is moved to Friday."}}),
                                       fc("send_imessage_message", {{"receiver", phone}, {"content", "Dinner is moved to Friday."}})});
            return b.finish();
        }
        case 9: {
            const AppAnswer& a = pick_from(rng, app_answers());
            GoldBuilder b(s, catalog, qid, split, "Find me a good " + a.need + " app and install it.");
            b.call(A::ExternalKnowledge, {fc("search_safari", {{"query", "best app for " + a.need}})});
            b.call(A::TaskCompletion, {fc("download_appstore_app", {{"app_name", a.app}})});
            return b.finish();
        }
        case 10: {
            const Themed& n = pick_from(rng, notes());
            GoldBuilder b(s, catalog, qid, split, "Share my " + lower(n.title) + " note on Instagram.");
            const auto& r = b.call(A::PersonalContext, {fc("get_notes_content", {{"keyword", n.title}})});
            b.call(A::TaskCompletion, {fc("create_instagram_post", {{"content", field(r[0], 0, "content")}})});
            return b.finish();
        }
        case 11: {
            const Record& other = contact_by_relationship(s, (contact_n + 2) % 6);
            const std::string other_name = other.fields.at("name").get<std::string>();
            GoldBuilder b(s, catalog, qid, split,
                          "Tell " + first_name(name) + " and " + first_name(other_name) + " that the party starts at 8.");
            const auto& r1 = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", first_name(name)}})});
            std::string p1 = field(r1[0], 0, "phone_number");
            const auto& r2 = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", first_name(other_name)}})});
            std::string p2 = field(r2[0], 0, "phone_number");
            b.call(A::TaskCompletion, {fc("send_imessage_message", {{"receiver", p1}, {"content", "The party starts at 8."}}),
                                       fc("send_imessage_message", {{"receiver", p2}, {"content", "The party starts at 8."}})});
            return b.finish();
        }
        case 12: {
            const Themed& p = pick_from(rng, podcasts());
            GoldBuilder b(s, catalog, qid, split, "Play that " + p.detail + " podcast I listened to recently.");
            const auto& r = b.call(A::PersonalContext, {fc("get_podcasts_history", {{"keyword", p.detail}})});
            b.call(A::TaskCompletion, {fc("play_podcasts", {{"title", field(r[0], 0, "title")}})});
            return b.finish();
        }
        default: {
            // Long query: several experts, one revisited.
            const Themed& m = pick_from(rng, meetings());
            GoldBuilder b(s, catalog, qid, split,
                          "Where am I, what's my " + lower(m.title) + " this week, and please tell my " + rel +
                              " about it and set a reminder an hour before.");
            b.call(A::DeviceInformation, {fc("get_location_information")});
            b.call(A::DeviceInformation, {fc("get_time_information")});
            const auto& ev = b.call(A::PersonalContext, {fc("get_calendar_event", {{"theme", m.detail}, {"time_range", "next week"}})});
            const auto& ev_all = ev[0].records.empty() ? b.call(A::PersonalContext, {fc("get_calendar_event", {{"theme", m.detail}})}) : ev;
            const Record event = ev_all[0].records.at(0);
            const auto& c = b.call(A::PersonalContext, {fc("get_contacts_information", {{"keyword", rel}})});
            b.intent();
            Timestamp when = *parse_timestamp(*event.timestamp);
            std::string title = event.fields.at("event_title").get<std::string>();
            b.call(A::TaskCompletion,
                   {fc("send_imessage_message", {{"receiver", field(c[0], 0, "phone_number")}, {"content", title + " is at " + format_timestamp(when) + "."}}),
                    fc("create_reminders", {{"time", format_timestamp(when - std::chrono::hours{1})}, {"content", title}})});
            return b.finish();
        }
    }
}

struct FixtureSet {
    std::vector<DeviceState> states;
    std::vector<Trajectory> gold;
    std::vector<Trajectory> pred_with_errors;
    std::vector<RecallQuery> adversarial;
};

// Copies of gold with one planted mistake in most plans.
inline std::vector<Trajectory> planted_errors(const std::vector<Trajectory>& gold, const std::map<std::string, const DeviceState*>& states,
                                              const ToolCatalog& catalog) {
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        Trajectory t = gold[i];
        auto& plan = t.final_plan;
        switch (i % 5) {
            case 0:
                if (plan.size() > 1) plan.pop_back();
                else plan.push_back(fc("create_notes", {{"content", "Follow up later"}}));
                break;
            case 1:
                for (auto& a : plan.front().args) {
                    if (a.name == "content" || a.name == "title" || a.name == "name" || a.name == "event_title" || a.name == "person" ||
                        a.name == "app_name") {
                        a.value = std::string("zzz qqq xxx");
                        break;
                    }
                }
                break;
            case 2:
                plan.front().args.push_back({"priority", std::string("high")});
                break;
            case 3:
                plan.front().name = plan.front().name == "send_mail" ? "send_imessage_message" : "send_mail";
                break;
            default:
                break;
        }
        Step& last = t.steps.back();
        last.calls = plan;
        last.completion = serialize(plan);
        last.results.clear();
        const DeviceState& s = *states.at(t.device_state);
        for (const auto& c : plan) last.results.push_back(execute_call(s, catalog, c));
        t.final_response.clear();
        out.push_back(std::move(t));
    }
    return out;
}

// Task phrasings that avoid the definition's words, and distractor phrasings that repeat them.
struct RecallPhrase {
    std::string tool;
    std::string indirect;
    std::string distractor;
};

inline const std::vector<RecallPhrase>& recall_phrases() {
    static const std::vector<RecallPhrase> v = {
        {"play_podcasts", "put on the latest episode of that show", "no need to play a podcast with a title"},
        {"create_notes", "jot this down for later", "forget about creating a note with specified content"},
        {"create_reminders", "nudge me about it at noon", "skip setting a reminder with the specified content at the specified time"},
        {"create_calendar_event", "block out my afternoon for it", "do not create a calendar event with the specified event title at the specified time"},
        {"cancel_calendar_event", "drop tomorrow's standup", "never cancel the calendar event with the specified event title"},
        {"send_mail", "drop the landlord a line", "avoid sending an email to the receiver with content"},
        {"send_imessage_message", "ping my sister", "don't send a message via iMessage to the receiver with the specified content"},
        {"play_music", "put on something upbeat", "no need to play music with the specified title"},
        {"call_contacts", "ring my dentist", "don't call the specified person"},
        {"download_appstore_app", "get that meditation thing on my phone", "no need to download the specified app"},
        {"show_maps_place", "where is the nearest bakery", "don't show the location of the specified place in the maps app"},
        {"show_amazon_item", "pull up those headphones to buy", "skip showing the page of the specified item on amazon"},
        {"create_instagram_post", "share this photo with my followers", "don't create a new post with the specified content on instagram"},
    };
    return v;
}

// 100 compositional queries: two or three gold tools phrased indirectly, plus one
// non-gold tool phrased in the catalog's own words.
inline std::vector<RecallQuery> adversarial_recall_set(Rng& rng, const ToolCatalog& catalog, std::size_t n = 100) {
    const auto& phrases = recall_phrases();
    for (const auto& p : phrases) {
        if (!catalog.contains(p.tool)) throw Error("recall fixture tool missing from catalog: " + p.tool);
    }
    std::vector<RecallQuery> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> idx(phrases.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        shuffle(rng, idx);
        std::size_t gold_n = 2 + pick(rng, 2);
        RecallQuery q;
        q.query_id = "r" + pad3(i + 1);
        q.agent = AgentKind::TaskCompletion;
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < gold_n; ++k) {
            q.gold.insert(phrases[idx[k]].tool);
            parts.push_back(phrases[idx[k]].indirect);
        }
        parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(pick(rng, parts.size() + 1)), phrases[idx[gold_n]].distractor);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            if (k) q.query += k + 1 == parts.size() ? ", and " : ", ";
            q.query += parts[k];
        }
        q.query[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(q.query[0])));
        q.query += ".";
        out.push_back(std::move(q));
    }
    return out;
}

inline constexpr std::size_t kGoldQueries = 50;

inline FixtureSet generate(std::uint64_t seed, const ToolCatalog& catalog) {
    Rng rng(seed);
    FixtureSet f;
    f.states.push_back(barcelona_state(catalog));
    static const std::vector<std::string> clocks = {"2024-03-04T08:15:00", "2024-06-12T17:40:00", "2024-09-27T12:05:00", "2024-11-30T21:20:00"};
    for (std::size_t i = 0; i < clocks.size(); ++i) f.states.push_back(synthetic_state("user-" + pad3(i + 1), clocks[i], rng, catalog));

    auto split_of = [](std::size_t i) { return i % 5 == 4 ? std::string("test") : std::string("train"); };
    f.gold.push_back(barcelona_trajectory(f.states[0], catalog, "q001", split_of(0)));
    for (std::size_t i = 1; i < kGoldQueries; ++i) {
        const DeviceState& s = f.states[1 + pick(rng, f.states.size() - 1)];
        f.gold.push_back(synthetic_trajectory(i - 1, s, catalog, "q" + pad3(i + 1), split_of(i), rng));
    }

    std::map<std::string, const DeviceState*> by_id;
    for (const auto& s : f.states) by_id[s.state_id] = &s;
    f.pred_with_errors = planted_errors(f.gold, by_id, catalog);
    f.adversarial = adversarial_recall_set(rng, catalog);
    return f;
}

} // namespace fixtures
} // namespace camphor
