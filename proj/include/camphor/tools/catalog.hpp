#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "camphor/error.hpp"
#include "camphor/tools/agent_kind.hpp"

namespace camphor {

enum class DomainKind { OpenString, Enum, Timestamp, TimeRange, Number };

inline std::string_view to_id(DomainKind kind) {
    switch (kind) {
        case DomainKind::OpenString: return "open_string";
        case DomainKind::Enum: return "enum";
        case DomainKind::Timestamp: return "timestamp";
        case DomainKind::TimeRange: return "time_range";
        case DomainKind::Number: return "number";
    }
    return "";
}

inline std::optional<DomainKind> domain_from_id(std::string_view id) {
    for (auto kind : {DomainKind::OpenString, DomainKind::Enum, DomainKind::Timestamp,
                      DomainKind::TimeRange, DomainKind::Number}) {
        if (to_id(kind) == id) return kind;
    }
    return std::nullopt;
}

struct ValueDomain {
    DomainKind kind = DomainKind::OpenString;
    std::vector<std::string> values; // only for Enum

    friend bool operator==(const ValueDomain&, const ValueDomain&) = default;
};

struct ParamSpec {
    std::string name;
    ValueDomain domain;
    bool required = true;

    friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct ToolDefinition {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    AgentKind owner = AgentKind::TaskCompletion;

    const ParamSpec* find_param(std::string_view param) const {
        for (const auto& p : params) {
            if (p.name == param) return &p;
        }
        return nullptr;
    }

    // "name(p1, p2): description", the line inlined into full-text prompts.
    std::string definition_text() const {
        std::string out = name + "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ", ";
            out += params[i].name;
        }
        out += "): ";
        out += description;
        return out;
    }

    friend bool operator==(const ToolDefinition&, const ToolDefinition&) = default;
};

class CatalogError : public Error {
public:
    enum class Code { EmptyCatalog, DuplicateToolName, UnknownOwner, MalformedParamSpec, MalformedDocument };

    CatalogError(Code code, const std::string& message) : Error(message), code_(code) {}

    Code code() const noexcept { return code_; }

private:
    Code code_;
};

// Immutable after construction; safe to share across threads.
class ToolCatalog {
public:
    ToolCatalog() = default;

    explicit ToolCatalog(std::vector<ToolDefinition> tools) : tools_(std::move(tools)) {
        if (tools_.empty()) throw CatalogError(CatalogError::Code::EmptyCatalog, "catalog has no tools");
        for (std::size_t i = 0; i < tools_.size(); ++i) {
            const auto& tool = tools_[i];
            if (!index_.emplace(tool.name, i).second) {
                throw CatalogError(CatalogError::Code::DuplicateToolName, "duplicate tool name: " + tool.name);
            }
            std::set<std::string> seen;
            for (const auto& p : tool.params) {
                if (p.name.empty() || !seen.insert(p.name).second) {
                    throw CatalogError(CatalogError::Code::MalformedParamSpec,
                                       "tool " + tool.name + ": empty or duplicate parameter '" + p.name + "'");
                }
                if (p.domain.kind == DomainKind::Enum && p.domain.values.empty()) {
                    throw CatalogError(CatalogError::Code::MalformedParamSpec,
                                       "tool " + tool.name + ": enum parameter '" + p.name + "' has no values");
                }
            }
        }
    }

    const std::vector<ToolDefinition>& tools() const noexcept { return tools_; }
    std::size_t size() const noexcept { return tools_.size(); }

    const ToolDefinition* find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        return it == index_.end() ? nullptr : &tools_[it->second];
    }

    bool contains(std::string_view name) const { return find(name) != nullptr; }

    // Tools of one owner in catalog order.
    std::vector<ToolDefinition> owned_by(AgentKind owner) const {
        std::vector<ToolDefinition> out;
        for (const auto& t : tools_) {
            if (t.owner == owner) out.push_back(t);
        }
        return out;
    }

    std::map<AgentKind, std::vector<ToolDefinition>> partition() const {
        std::map<AgentKind, std::vector<ToolDefinition>> out;
        for (auto kind : kAllAgents) out[kind];
        for (const auto& t : tools_) out[t.owner].push_back(t);
        return out;
    }

private:
    std::vector<ToolDefinition> tools_;
    std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Catalog documents
//
// {
//   "format_version": 1,
//   "tools": [
//     {"name": "create_reminders", "owner": "TaskCompletion",
//      "description": "Set a reminder ...",
//      "params": [{"name": "time", "domain": {"kind": "timestamp"}, "required": true}, ...]}
//   ]
// }
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json catalog_to_json(const ToolCatalog& catalog) {
    nlohmann::ordered_json tools = nlohmann::ordered_json::array();
    for (const auto& t : catalog.tools()) {
        nlohmann::ordered_json params = nlohmann::ordered_json::array();
        for (const auto& p : t.params) {
            nlohmann::ordered_json domain = {{"kind", to_id(p.domain.kind)}};
            if (p.domain.kind == DomainKind::Enum) domain["values"] = p.domain.values;
            params.push_back({{"name", p.name}, {"domain", domain}, {"required", p.required}});
        }
        tools.push_back({{"name", t.name}, {"owner", to_id(t.owner)}, {"description", t.description}, {"params", params}});
    }
    return {{"format_version", 1}, {"tools", tools}};
}

inline ToolCatalog load_catalog(const nlohmann::json& doc) {
    using Code = CatalogError::Code;
    if (!doc.is_object()) {
        if (doc.is_null() || (doc.is_array() && doc.empty())) throw CatalogError(Code::EmptyCatalog, "empty catalog document");
        throw CatalogError(Code::MalformedDocument, "catalog document must be an object");
    }
    if (!doc.contains("tools") || !doc["tools"].is_array()) {
        if (doc.empty()) throw CatalogError(Code::EmptyCatalog, "empty catalog document");
        throw CatalogError(Code::MalformedDocument, "catalog document has no 'tools' array");
    }
    std::vector<ToolDefinition> tools;
    for (const auto& rec : doc["tools"]) {
        if (!rec.is_object() || !rec.contains("name") || !rec["name"].is_string() || !rec.contains("owner") ||
            !rec["owner"].is_string()) {
            throw CatalogError(Code::MalformedDocument, "tool record needs string 'name' and 'owner'");
        }
        ToolDefinition tool;
        tool.name = rec["name"].get<std::string>();
        auto owner = agent_from_id(rec["owner"].get<std::string>());
        if (!owner) throw CatalogError(Code::UnknownOwner, "tool " + tool.name + ": unknown owner '" + rec["owner"].get<std::string>() + "'");
        tool.owner = *owner;
        tool.description = rec.value("description", "");
        for (const auto& p : rec.value("params", nlohmann::json::array())) {
            if (!p.is_object() || !p.contains("name") || !p["name"].is_string()) {
                throw CatalogError(Code::MalformedParamSpec, "tool " + tool.name + ": parameter needs a string 'name'");
            }
            ParamSpec spec;
            spec.name = p["name"].get<std::string>();
            spec.required = p.value("required", true);
            if (p.contains("domain")) {
                const auto& d = p["domain"];
                std::string kind = d.is_string() ? d.get<std::string>() : d.value("kind", "");
                auto parsed = domain_from_id(kind);
                if (!parsed) {
                    throw CatalogError(Code::MalformedParamSpec,
                                       "tool " + tool.name + ": parameter '" + spec.name + "' has unknown domain '" + kind + "'");
                }
                spec.domain.kind = *parsed;
                if (d.is_object() && d.contains("values")) {
                    for (const auto& v : d["values"]) spec.domain.values.push_back(v.get<std::string>());
                }
            }
            tool.params.push_back(std::move(spec));
        }
        tools.push_back(std::move(tool));
    }
    return ToolCatalog(std::move(tools));
}

inline ToolCatalog load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open catalog file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw CatalogError(CatalogError::Code::MalformedDocument, path + ": " + e.what());
    }
    return load_catalog(doc);
}

// ---------------------------------------------------------------------------
// Default catalog: the appendix toolboxes, verbatim.
// ---------------------------------------------------------------------------

namespace detail {

inline ParamSpec open_param(std::string name, bool required = true) {
    return ParamSpec{std::move(name), {DomainKind::OpenString, {}}, required};
}

inline ParamSpec optional_keyword(std::string name) { return open_param(std::move(name), false); }

inline ParamSpec optional_range() { return ParamSpec{"time_range", {DomainKind::TimeRange, {}}, false}; }

inline ParamSpec timestamp_param(std::string name) {
    return ParamSpec{std::move(name), {DomainKind::Timestamp, {}}, true};
}

} // namespace detail

inline const ToolCatalog& default_catalog() {
    static const ToolCatalog catalog = [] {
        using detail::open_param;
        using detail::optional_keyword;
        using detail::optional_range;
        using detail::timestamp_param;
        using A = AgentKind;
        std::vector<ToolDefinition> t;
        auto add = [&](std::string name, std::vector<ParamSpec> params, std::string description, AgentKind owner) {
            t.push_back(ToolDefinition{std::move(name), std::move(description), std::move(params), owner});
        };

        add("get_screen_information", {}, "Get a detailed textual description of the user's screen content.", A::DeviceInformation);
        add("get_location_information", {}, "Get detailed current location information of user.", A::DeviceInformation);
        add("get_time_information", {}, "Get detailed current time information of user.", A::DeviceInformation);

        add("get_intent", {}, "Get a high-level understanding of the user's intent.", A::UserPerception);

        add("get_settings_cellular", {}, "Retrieve user's cellular data usage summary.", A::PersonalContext);
        add("get_settings_notifications", {optional_keyword("keyword")}, "Retrieve user's notifications containing a specific keyword.", A::PersonalContext);
        add("get_health_records", {}, "Retrieve user's health records.", A::PersonalContext);
        add("get_health_medications", {}, "Retrieve user's medication list.", A::PersonalContext);
        add("get_fitness_summary", {}, "Retrieve user's fitness summary and activity.", A::PersonalContext);
        add("get_safari_history", {optional_keyword("keyword")}, "Retrieve browsing history of Safari containing a specific keyword.", A::PersonalContext);
        add("get_news_history", {optional_keyword("keyword")}, "Retrieve browsing history of News containing a specific keyword.", A::PersonalContext);
        add("get_podcasts_history", {optional_keyword("keyword")}, "Retrieve listening history of Podcasts containing a specific keyword.", A::PersonalContext);
        add("get_notes_content", {optional_keyword("keyword")}, "Retrieve notes containing a specific keyword.", A::PersonalContext);
        add("get_reminders_content", {optional_keyword("keyword"), optional_range()}, "Retrieve reminders containing a specific keyword or/and within a specific time range.", A::PersonalContext);
        add("get_calendar_event", {optional_keyword("theme"), optional_range()}, "Retrieve calendar events related to a theme or/and within a specified time range.", A::PersonalContext);
        add("get_mail_event", {optional_keyword("theme"), optional_range()}, "Retrieve mail invitation or confirmation for events related to a theme or/and within a specified time range.", A::PersonalContext);
        add("get_imessage_history", {optional_keyword("keyword")}, "Retrieve chatting history of iMessage containing a specific keyword.", A::PersonalContext);
        add("get_music_playlist", {optional_keyword("keyword")}, "Retrieve songs in user's music playlist containing a specific keyword.", A::PersonalContext);
        add("get_voice_recording", {optional_keyword("keyword")}, "Retrieve recordings from the user's voice memos with titles containing a specific keyword.", A::PersonalContext);
        add("get_books_library", {}, "Retrieve user's reading books.", A::PersonalContext);
        add("get_contacts_information", {optional_keyword("keyword")}, "Retrieve contact information, including person_id, name, phone_number, relationship.", A::PersonalContext);
        add("get_appstore_history", {}, "Retrieve the purchase and download history of apps.", A::PersonalContext);
        add("get_maps_places", {optional_keyword("keyword")}, "Retrieve user's saved places containing a specific keyword.", A::PersonalContext);
        add("get_amazon_information", {}, "Retrieve user's Amazon account information.", A::PersonalContext);
        add("get_amazon_orders", {optional_keyword("keyword")}, "Retrieve user's Amazon orders containing a specific keyword.", A::PersonalContext);
        add("get_instagram_information", {}, "Retrieve user's Instagram account information.", A::PersonalContext);
        add("get_instagram_post", {optional_keyword("keyword")}, "Retrieve user's Instagram post containing a specific keyword.", A::PersonalContext);

        add("search_safari", {open_param("query")}, "Perform a search in Safari app using the specified query, which can include searches for information, weather forecasts, available items on Amazon, and other types of information.", A::ExternalKnowledge);

        add("play_podcasts", {open_param("title")}, "Play a podcast with the specified title.", A::TaskCompletion);
        add("create_notes", {open_param("content")}, "Create a note with the specified content.", A::TaskCompletion);
        add("create_reminders", {timestamp_param("time"), open_param("content")}, "Set a reminder with the specified content at the specified time.", A::TaskCompletion);
        add("create_calendar_event", {timestamp_param("time"), open_param("event_title")}, "Create a calendar event with the specified event_title at the specified time.", A::TaskCompletion);
        add("cancel_calendar_event", {open_param("event_title")}, "Cancel the calendar event with the specified event_title.", A::TaskCompletion);
        add("send_mail", {open_param("receiver"), open_param("content")}, "Send an email to the receiver with the specified content.", A::TaskCompletion);
        add("send_imessage_message", {open_param("receiver"), open_param("content")}, "Send a message to the receiver with the specified content via iMessage.", A::TaskCompletion);
        add("play_music", {open_param("title")}, "Play music with the specified title.", A::TaskCompletion);
        add("call_contacts", {open_param("person")}, "Call the specified person.", A::TaskCompletion);
        add("download_appstore_app", {open_param("app_name")}, "Download the specified app.", A::TaskCompletion);
        add("show_maps_place", {open_param("name")}, "Show the location of the specified place in the Maps app.", A::TaskCompletion);
        add("show_amazon_item", {open_param("name")}, "Show the page of the specified item on Amazon.", A::TaskCompletion);
        add("create_instagram_post", {open_param("content")}, "Create a new post with the specified content on Instagram.", A::TaskCompletion);
        return ToolCatalog(std::move(t));
    }();
    return catalog;
}

} // namespace camphor
