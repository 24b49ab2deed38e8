#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/device/timestamp.hpp"
#include "camphor/error.hpp"
#include "camphor/tools/catalog.hpp"

namespace camphor {

using ordered_json = nlohmann::ordered_json;

struct Record {
    std::string id;
    std::string app;
    ordered_json fields = ordered_json::object(); // scalar values, insertion-ordered
    std::optional<std::string> timestamp;

    friend bool operator==(const Record& a, const Record& b) {
        return a.id == b.id && a.app == b.app && a.fields == b.fields && a.timestamp == b.timestamp;
    }
};

struct WorldKnowledgeEntry {
    std::string pattern;
    std::string result;
};

struct DeviceInfo {
    ordered_json location = ordered_json::object();
    std::string clock; // ISO timestamp
    std::string screen;
    std::string intent;
};

// Pseudo app holding device-information records, so every result record has a home store.
inline constexpr std::string_view kDeviceApp = "device";

struct DeviceState {
    std::string state_id;
    std::map<std::string, std::vector<Record>> app_stores;
    DeviceInfo device_info;
    std::set<std::string> installed_tools;
    std::vector<WorldKnowledgeEntry> world_knowledge;

    Timestamp clock() const {
        auto t = parse_timestamp(device_info.clock);
        if (!t) throw Error("device state " + state_id + ": invalid clock '" + device_info.clock + "'");
        return *t;
    }

    const std::vector<Record>& store(const std::string& app) const {
        static const std::vector<Record> empty;
        auto it = app_stores.find(app);
        return it == app_stores.end() ? empty : it->second;
    }
};

class DeviceStateError : public Error {
public:
    DeviceStateError(const std::string& state_id, std::vector<std::string> problems)
        : Error(describe(state_id, problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string describe(const std::string& id, const std::vector<std::string>& problems) {
        std::string msg = "device state '" + id + "' is invalid:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
    }

    std::vector<std::string> problems_;
};

/*
 * Device-state document:
 * {
 *   "format_version": 1,
 *   "state_id": "user-001",
 *   "device_info": {"location": {...}, "clock": "2023-12-15T09:30:00", "screen": "...", "intent": "..."},
 *   "installed_tools": ["get_contacts_information", ...],
 *   "apps": {"contacts": [{"id": "003", "timestamp": null, "fields": {...}}], ...},
 *   "world_knowledge": [{"pattern": "...", "result": "..."}]
 * }
 */
inline ordered_json device_state_to_json(const DeviceState& s) {
    ordered_json apps = ordered_json::object();
    for (const auto& [app, records] : s.app_stores) {
        ordered_json list = ordered_json::array();
        for (const auto& r : records) {
            ordered_json rec = {{"id", r.id}};
            if (r.timestamp) rec["timestamp"] = *r.timestamp;
            rec["fields"] = r.fields;
            list.push_back(std::move(rec));
        }
        apps[app] = std::move(list);
    }
    ordered_json wk = ordered_json::array();
    for (const auto& e : s.world_knowledge) wk.push_back({{"pattern", e.pattern}, {"result", e.result}});
    return {
        {"format_version", 1},
        {"state_id", s.state_id},
        {"device_info",
         {{"location", s.device_info.location},
          {"clock", s.device_info.clock},
          {"screen", s.device_info.screen},
          {"intent", s.device_info.intent}}},
        {"installed_tools", s.installed_tools},
        {"apps", apps},
        {"world_knowledge", wk},
    };
}

// Checks invariants: installed tools are catalog tools, clock and record timestamps
// parse, record ids are unique within their store.
inline std::vector<std::string> check_device_state(const DeviceState& s, const ToolCatalog& catalog) {
    std::vector<std::string> problems;
    if (s.state_id.empty()) problems.push_back("missing state_id");
    for (const auto& t : s.installed_tools) {
        if (!catalog.contains(t)) problems.push_back("installed tool not in catalog: " + t);
    }
    if (!parse_timestamp(s.device_info.clock)) problems.push_back("invalid clock: '" + s.device_info.clock + "'");
    for (const auto& [app, records] : s.app_stores) {
        std::set<std::string> ids;
        for (const auto& r : records) {
            if (r.id.empty()) problems.push_back(app + ": record without id");
            if (!ids.insert(r.id).second) problems.push_back(app + ": duplicate record id " + r.id);
            if (r.app != app) problems.push_back(app + ": record " + r.id + " carries app '" + r.app + "'");
            if (r.timestamp && !parse_timestamp(*r.timestamp)) {
                problems.push_back(app + ": record " + r.id + " has invalid timestamp '" + *r.timestamp + "'");
            }
            if (!r.fields.is_object()) problems.push_back(app + ": record " + r.id + " fields must be an object");
        }
    }
    return problems;
}

inline DeviceState device_state_from_json(const ordered_json& doc, const ToolCatalog& catalog) {
    DeviceState s;
    std::vector<std::string> problems;
    try {
        s.state_id = doc.at("state_id").get<std::string>();
        const auto& info = doc.at("device_info");
        s.device_info.location = info.value("location", ordered_json::object());
        s.device_info.clock = info.at("clock").get<std::string>();
        s.device_info.screen = info.value("screen", "");
        s.device_info.intent = info.value("intent", "");
        for (const auto& t : doc.value("installed_tools", ordered_json::array())) s.installed_tools.insert(t.get<std::string>());
        const ordered_json apps = doc.value("apps", ordered_json::object());
        for (const auto& [app, records] : apps.items()) {
            auto& store = s.app_stores[app];
            for (const auto& r : records) {
                Record rec;
                rec.id = r.at("id").is_string() ? r.at("id").get<std::string>() : r.at("id").dump();
                rec.app = app;
                rec.fields = r.value("fields", ordered_json::object());
                if (r.contains("timestamp") && r["timestamp"].is_string()) rec.timestamp = r["timestamp"].get<std::string>();
                store.push_back(std::move(rec));
            }
        }
        for (const auto& e : doc.value("world_knowledge", ordered_json::array())) {
            s.world_knowledge.push_back({e.at("pattern").get<std::string>(), e.at("result").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        problems.push_back(std::string("schema: ") + e.what());
        throw DeviceStateError(s.state_id.empty() ? "?" : s.state_id, problems);
    }
    problems = check_device_state(s, catalog);
    if (!problems.empty()) throw DeviceStateError(s.state_id, problems);
    return s;
}

inline DeviceState load_device_state_file(const std::filesystem::path& path, const ToolCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open device state: " + path.string());
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DeviceStateError(path.filename().string(), {e.what()});
    }
    return device_state_from_json(doc, catalog);
}

// Loads every *.json file in a directory, keyed by state id.
inline std::map<std::string, DeviceState> load_device_states(const std::filesystem::path& dir, const ToolCatalog& catalog) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("device-state directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, DeviceState> out;
    for (const auto& f : files) {
        DeviceState s = load_device_state_file(f, catalog);
        std::string id = s.state_id;
        if (!out.emplace(id, std::move(s)).second) throw ConfigError("duplicate device state id: " + id);
    }
    return out;
}

} // namespace camphor
