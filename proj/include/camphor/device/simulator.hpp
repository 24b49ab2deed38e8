#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "camphor/device/state.hpp"
#include "camphor/device/timestamp.hpp"
#include "camphor/tools/catalog.hpp"
#include "camphor/tools/function_call.hpp"

namespace camphor {

enum class ResultStatus { Ok, Error };

enum class ExecErrorCode { None, UnknownTool, ToolNotInstalled, BadArgument };

inline std::string_view to_id(ExecErrorCode code) {
    switch (code) {
        case ExecErrorCode::None: return "";
        case ExecErrorCode::UnknownTool: return "UnknownTool";
        case ExecErrorCode::ToolNotInstalled: return "ToolNotInstalled";
        case ExecErrorCode::BadArgument: return "BadArgument";
    }
    return "";
}

inline ExecErrorCode exec_error_from_id(std::string_view id) {
    for (auto c : {ExecErrorCode::UnknownTool, ExecErrorCode::ToolNotInstalled, ExecErrorCode::BadArgument}) {
        if (to_id(c) == id) return c;
    }
    return ExecErrorCode::None;
}

// status == Error implies a text payload holding the diagnostic.
struct ExecutionResult {
    ResultStatus status = ResultStatus::Ok;
    ExecErrorCode error = ExecErrorCode::None;
    bool is_text = false;
    std::vector<Record> records;
    std::string text;
    FunctionCall source_call;

    static ExecutionResult of_records(FunctionCall call, std::vector<Record> records) {
        ExecutionResult r;
        r.records = std::move(records);
        r.source_call = std::move(call);
        return r;
    }

    static ExecutionResult of_text(FunctionCall call, std::string text) {
        ExecutionResult r;
        r.is_text = true;
        r.text = std::move(text);
        r.source_call = std::move(call);
        return r;
    }

    static ExecutionResult failure(FunctionCall call, ExecErrorCode code, std::string message) {
        ExecutionResult r;
        r.status = ResultStatus::Error;
        r.error = code;
        r.is_text = true;
        r.text = std::move(message);
        r.source_call = std::move(call);
        return r;
    }

    bool ok() const { return status == ResultStatus::Ok; }

    friend bool operator==(const ExecutionResult& a, const ExecutionResult& b) {
        return a.status == b.status && a.error == b.error && a.is_text == b.is_text && a.records == b.records &&
               a.text == b.text && a.source_call == b.source_call;
    }
};

inline constexpr std::string_view kNoResultText = "No results found.";

// ---------------------------------------------------------------------------
// Matching primitives
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fold(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string alnum_fold(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

inline bool is_alias_field(std::string_view name) {
    return name == "relationship" || name == "alias" || name == "aliases" || name == "nickname";
}

// Lower-cased alphanumeric runs, the unit of search-overlap scoring.
inline std::set<std::string> word_set(std::string_view text) {
    std::set<std::string> out;
    std::string cur;
    for (char c : text) {
        auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc) || uc >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!cur.empty()) {
            out.insert(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.insert(std::move(cur));
    return out;
}

} // namespace detail

// Case-folded substring over every string field (and string array elements); alias-like
// fields such as "relationship" also match when equal after dropping punctuation and case.
inline bool keyword_match(const Record& record, std::string_view keyword) {
    const std::string needle = detail::fold(keyword);
    const std::string squashed = detail::alnum_fold(keyword);
    if (needle.empty()) return true;
    auto check = [&](const std::string& field, const std::string& value) {
        if (detail::fold(value).find(needle) != std::string::npos) return true;
        return detail::is_alias_field(field) && !squashed.empty() && detail::alnum_fold(value) == squashed;
    };
    for (const auto& [name, value] : record.fields.items()) {
        if (value.is_string() && check(name, value.get<std::string>())) return true;
        if (value.is_array()) {
            for (const auto& v : value) {
                if (v.is_string() && check(name, v.get<std::string>())) return true;
            }
        }
    }
    return false;
}

inline std::size_t search_overlap(std::string_view query, std::string_view pattern) {
    auto q = detail::word_set(query);
    auto p = detail::word_set(pattern);
    std::size_t n = 0;
    for (const auto& w : q) n += p.count(w);
    return n;
}

// Best world-knowledge entry by token overlap; earliest entry wins ties.
inline ExecutionResult answer_search(const DeviceState& state, std::string_view query, FunctionCall source = {}) {
    std::size_t best = 0;
    const WorldKnowledgeEntry* winner = nullptr;
    for (const auto& e : state.world_knowledge) {
        std::size_t score = search_overlap(query, e.pattern);
        if (score > best) {
            best = score;
            winner = &e;
        }
    }
    if (source.name.empty()) {
        source.name = "search_safari";
        source.args = {{"query", std::string(query)}};
    }
    return ExecutionResult::of_text(std::move(source), winner ? winner->result : std::string(kNoResultText));
}

// ---------------------------------------------------------------------------
// Tool bindings
// ---------------------------------------------------------------------------

struct StoreBinding {
    std::string app;
    std::vector<std::string> keyword_params; // any of these filters by keyword_match
};

// Personal-context tools read one app store each.
inline const std::map<std::string, StoreBinding, std::less<>>& store_bindings() {
    static const std::map<std::string, StoreBinding, std::less<>> b = {
        {"get_settings_cellular", {"settings_cellular", {}}},
        {"get_settings_notifications", {"settings_notifications", {"keyword"}}},
        {"get_health_records", {"health_records", {}}},
        {"get_health_medications", {"health_medications", {}}},
        {"get_fitness_summary", {"fitness", {}}},
        {"get_safari_history", {"safari", {"keyword"}}},
        {"get_news_history", {"news", {"keyword"}}},
        {"get_podcasts_history", {"podcasts", {"keyword"}}},
        {"get_notes_content", {"notes", {"keyword"}}},
        {"get_reminders_content", {"reminders", {"keyword"}}},
        {"get_calendar_event", {"calendar", {"theme"}}},
        {"get_mail_event", {"mail", {"theme"}}},
        {"get_imessage_history", {"messages", {"keyword"}}},
        {"get_music_playlist", {"music", {"keyword"}}},
        {"get_voice_recording", {"voice_memos", {"keyword"}}},
        {"get_books_library", {"books", {}}},
        {"get_contacts_information", {"contacts", {"keyword"}}},
        {"get_appstore_history", {"appstore", {}}},
        {"get_maps_places", {"maps", {"keyword"}}},
        {"get_amazon_information", {"amazon_account", {}}},
        {"get_amazon_orders", {"amazon_orders", {"keyword"}}},
        {"get_instagram_information", {"instagram_account", {}}},
        {"get_instagram_post", {"instagram_posts", {"keyword"}}},
    };
    return b;
}

// Tools available on every device regardless of installation.
inline bool is_static_tool(const ToolDefinition& tool) { return !has_dynamic_tools(tool.owner); }

// Reads never change state. Task-completion tools append the call to `effects`
// (when given) and acknowledge. Failures are returned in-band.
inline ExecutionResult execute_call(const DeviceState& state, const ToolCatalog& catalog, const FunctionCall& call,
                                    std::vector<FunctionCall>* effects = nullptr) {
    const ToolDefinition* tool = catalog.find(call.name);
    if (!tool) return ExecutionResult::failure(call, ExecErrorCode::UnknownTool, "unknown tool: " + call.name);
    if (!is_static_tool(*tool) && !state.installed_tools.count(call.name)) {
        return ExecutionResult::failure(call, ExecErrorCode::ToolNotInstalled, "tool not installed on this device: " + call.name);
    }
    for (const auto& arg : call.args) {
        if (!tool->find_param(arg.name)) {
            return ExecutionResult::failure(call, ExecErrorCode::BadArgument, call.name + ": unknown parameter '" + arg.name + "'");
        }
    }
    for (const auto& p : tool->params) {
        const Value* v = call.find(p.name);
        if (!v) {
            if (p.required) {
                return ExecutionResult::failure(call, ExecErrorCode::BadArgument, call.name + ": missing parameter '" + p.name + "'");
            }
            continue;
        }
        if (p.domain.kind == DomainKind::Timestamp && !parse_timestamp(value_text(*v))) {
            return ExecutionResult::failure(call, ExecErrorCode::BadArgument,
                                            call.name + ": '" + value_text(*v) + "' is not an ISO-8601 timestamp");
        }
        if (p.domain.kind == DomainKind::Enum) {
            auto text = value_text(*v);
            if (std::find(p.domain.values.begin(), p.domain.values.end(), text) == p.domain.values.end()) {
                return ExecutionResult::failure(call, ExecErrorCode::BadArgument, call.name + ": '" + text + "' not allowed for " + p.name);
            }
        }
    }

    const auto device_record = [&](std::string id, ordered_json fields) {
        Record r;
        r.id = std::move(id);
        r.app = std::string(kDeviceApp);
        r.fields = std::move(fields);
        return r;
    };

    if (call.name == "get_location_information") {
        return ExecutionResult::of_records(call, {device_record("location", state.device_info.location)});
    }
    if (call.name == "get_time_information") {
        auto clock = parse_timestamp(state.device_info.clock);
        if (!clock) return ExecutionResult::failure(call, ExecErrorCode::BadArgument, "device clock is invalid");
        static constexpr const char* kDays[] = {"Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"};
        std::chrono::weekday wd{std::chrono::floor<std::chrono::days>(*clock)};
        return ExecutionResult::of_records(
            call, {device_record("time", ordered_json{{"datetime", format_timestamp(*clock)}, {"weekday", kDays[wd.c_encoding()]}})});
    }
    if (call.name == "get_screen_information") return ExecutionResult::of_text(call, state.device_info.screen);
    if (call.name == "get_intent") return ExecutionResult::of_text(call, state.device_info.intent);
    if (call.name == "search_safari") return answer_search(state, value_text(*call.find("query")), call);

    if (auto it = store_bindings().find(call.name); it != store_bindings().end()) {
        const StoreBinding& binding = it->second;
        std::optional<TimeInterval> range;
        if (const Value* tr = call.find("time_range")) {
            try {
                range = resolve_time_range(value_text(*tr), state.clock());
            } catch (const UnparseableTimeRange& e) {
                return ExecutionResult::failure(call, ExecErrorCode::BadArgument, e.what());
            }
        }
        std::vector<Record> hits;
        for (const auto& rec : state.store(binding.app)) {
            bool keep = true;
            for (const auto& kp : binding.keyword_params) {
                if (const Value* kw = call.find(kp); kw && !value_text(*kw).empty()) keep = keep && keyword_match(rec, value_text(*kw));
            }
            if (keep && range) {
                auto ts = rec.timestamp ? parse_timestamp(*rec.timestamp) : std::nullopt;
                keep = ts && range->contains(*ts);
            }
            if (keep) hits.push_back(rec);
        }
        return ExecutionResult::of_records(call, std::move(hits));
    }

    if (tool->owner == AgentKind::TaskCompletion) {
        if (effects) effects->push_back(call);
        return ExecutionResult::of_text(call, "Success: " + call.name + " executed.");
    }
    return ExecutionResult::failure(call, ExecErrorCode::UnknownTool, "no simulator binding for tool: " + call.name);
}

// One episode's view of a device: shared read-only state plus a private effects log.
class Simulator {
public:
    Simulator(const DeviceState& state, const ToolCatalog& catalog) : state_(&state), catalog_(&catalog) {}

    ExecutionResult execute(const FunctionCall& call) {
        calls_.push_back(call);
        return execute_call(*state_, *catalog_, call, &effects_);
    }

    const std::vector<FunctionCall>& effects() const noexcept { return effects_; }
    const std::vector<FunctionCall>& call_log() const noexcept { return calls_; }

private:
    const DeviceState* state_;
    const ToolCatalog* catalog_;
    std::vector<FunctionCall> effects_;
    std::vector<FunctionCall> calls_;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

// Python-style JSON text: ", " and ": " separators, non-ASCII kept verbatim.
inline void render_json(const ordered_json& v, std::string& out) {
    if (v.is_object()) {
        out.push_back('{');
        bool first = true;
        for (const auto& [k, val] : v.items()) {
            if (!first) out += ", ";
            first = false;
            out += ordered_json(k).dump();
            out += ": ";
            render_json(val, out);
        }
        out.push_back('}');
    } else if (v.is_array()) {
        out.push_back('[');
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            render_json(v[i], out);
        }
        out.push_back(']');
    } else {
        out += v.dump();
    }
}

} // namespace detail

// The "[Execution Result]" body: a list of records, or bracketed text.
inline std::string render_result(const ExecutionResult& r) {
    std::string out = "[";
    if (!r.ok()) {
        out += "Error: ";
        out += to_id(r.error);
        out += ": ";
        out += r.text;
    } else if (r.is_text) {
        out += r.text;
    } else {
        for (std::size_t i = 0; i < r.records.size(); ++i) {
            if (i) out += ", ";
            detail::render_json(r.records[i].fields, out);
        }
    }
    out.push_back(']');
    return out;
}

inline ordered_json result_to_json(const ExecutionResult& r) {
    ordered_json j = {{"call", serialize(r.source_call)}, {"status", r.ok() ? "ok" : "error"}};
    if (!r.ok()) j["code"] = to_id(r.error);
    if (r.is_text) {
        j["text"] = r.text;
    } else {
        ordered_json recs = ordered_json::array();
        for (const auto& rec : r.records) {
            ordered_json o = {{"id", rec.id}, {"app", rec.app}};
            if (rec.timestamp) o["timestamp"] = *rec.timestamp;
            o["fields"] = rec.fields;
            recs.push_back(std::move(o));
        }
        j["records"] = std::move(recs);
    }
    return j;
}

} // namespace camphor
