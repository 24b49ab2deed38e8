#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/error.hpp"
#include "camphor/eval/report.hpp"
#include "camphor/prompt/builder.hpp"
#include "camphor/prompt/embedding.hpp"
#include "camphor/runtime/episode.hpp"
#include "camphor/runtime/http_client.hpp"
#include "camphor/sidecar.hpp"

namespace camphor {

namespace fs = std::filesystem;

struct BackendSpec {
    std::string kind = "oracle"; // oracle | http
    std::string endpoint;
    GenerateParams generate;
    double timeout_seconds = 30.0;
    int retries = 0;
};

// trigram | sidecar (similarity); lexical | dense (retriever)
struct ProviderSpec {
    std::string kind;
    std::string endpoint;
};

/*
 * Everything a command needs. Loaded from a JSON file; relative paths in the file are
 * relative to the file. Command-line flags override individual fields.
 *
 * {
 *   "dataset": "gold.jsonl", "device_states": "device_states", "catalog": "catalog.json",
 *   "backend": {"kind": "oracle"},
 *   "prompt_mode": "full_text", "k": 5, "max_steps": 20, "include_instruction": true,
 *   "similarity": {"kind": "trigram"}, "retriever": {"kind": "lexical"},
 *   "tokenizer": "wordpunct", "threshold": 0.7, "averaging": "macro",
 *   "output_dir": "out", "seed": 7, "jobs": 1
 * }
 */
struct RunConfig {
    fs::path dataset;
    fs::path device_states;
    fs::path catalog; // empty: built-in default catalog
    BackendSpec backend;
    PromptMode prompt_mode = PromptMode::FullText;
    std::size_t k = 5;
    std::size_t max_steps = kDefaultMaxSteps;
    bool include_instruction = true;
    bool baseline_mode = false;
    ProviderSpec similarity{"trigram", ""};
    ProviderSpec retriever{"lexical", ""};
    std::string tokenizer = "wordpunct";
    double threshold = kLenientThreshold;
    Averaging averaging = Averaging::Macro;
    fs::path output_dir = "out";
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool expect_released = false;
    fs::path predictions;    // eval: defaults to <output_dir>/predictions.jsonl
    fs::path recall_queries; // recall: stand-alone query set instead of the data set
    AgentKind recall_agent = AgentKind::TaskCompletion;
};

namespace detail {

inline fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <class T>
T config_value(const nlohmann::json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config: '") + key + "' has the wrong type");
    }
}

inline ProviderSpec provider_spec(const nlohmann::json& doc, const char* key, ProviderSpec fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (v.is_string()) return {v.get<std::string>(), ""};
    if (!v.is_object()) throw ConfigError(std::string("config: '") + key + "' must be a string or an object");
    return {config_value<std::string>(v, "kind", fallback.kind), config_value<std::string>(v, "endpoint", "")};
}

} // namespace detail

inline RunConfig parse_config(const nlohmann::json& doc, const fs::path& base_dir = {}) {
    static const std::set<std::string> known = {
        "format_version", "dataset", "device_states", "catalog", "backend", "prompt_mode", "k", "max_steps", "include_instruction",
        "baseline_mode", "similarity", "retriever", "tokenizer", "threshold", "averaging", "output_dir", "seed", "jobs",
        "expect_released", "predictions", "recall_queries", "recall_agent"};
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : doc.items()) {
        if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    }
    using detail::config_value;
    RunConfig c;
    c.dataset = detail::resolve(base_dir, config_value<std::string>(doc, "dataset", ""));
    c.device_states = detail::resolve(base_dir, config_value<std::string>(doc, "device_states", ""));
    c.catalog = detail::resolve(base_dir, config_value<std::string>(doc, "catalog", ""));
    if (doc.contains("backend")) {
        const auto& b = doc.at("backend");
        if (b.is_string()) {
            c.backend.kind = b.get<std::string>();
        } else {
            c.backend.kind = config_value<std::string>(b, "kind", "oracle");
            c.backend.endpoint = config_value<std::string>(b, "endpoint", "");
            c.backend.generate.model = config_value<std::string>(b, "model", "");
            c.backend.generate.temperature = config_value<double>(b, "temperature", 0.0);
            c.backend.generate.max_tokens = config_value<int>(b, "max_tokens", 256);
            if (b.contains("seed")) c.backend.generate.seed = config_value<std::uint64_t>(b, "seed", 0);
            c.backend.timeout_seconds = config_value<double>(b, "timeout_seconds", 30.0);
            c.backend.retries = config_value<int>(b, "retries", 0);
        }
    }
    c.prompt_mode = prompt_mode_from_id(config_value<std::string>(doc, "prompt_mode", "full_text"));
    c.k = config_value<std::size_t>(doc, "k", c.k);
    c.max_steps = config_value<std::size_t>(doc, "max_steps", c.max_steps);
    c.include_instruction = config_value<bool>(doc, "include_instruction", true);
    c.baseline_mode = config_value<bool>(doc, "baseline_mode", false);
    c.similarity = detail::provider_spec(doc, "similarity", c.similarity);
    c.retriever = detail::provider_spec(doc, "retriever", c.retriever);
    c.tokenizer = config_value<std::string>(doc, "tokenizer", c.tokenizer);
    c.threshold = config_value<double>(doc, "threshold", c.threshold);
    c.averaging = averaging_from_id(config_value<std::string>(doc, "averaging", "macro"));
    c.output_dir = detail::resolve(base_dir, config_value<std::string>(doc, "output_dir", "out"));
    c.seed = config_value<std::uint64_t>(doc, "seed", 0);
    c.jobs = config_value<std::size_t>(doc, "jobs", 1);
    c.expect_released = config_value<bool>(doc, "expect_released", false);
    c.predictions = detail::resolve(base_dir, config_value<std::string>(doc, "predictions", ""));
    c.recall_queries = detail::resolve(base_dir, config_value<std::string>(doc, "recall_queries", ""));
    auto agent = agent_from_id(config_value<std::string>(doc, "recall_agent", "TaskCompletion"));
    if (!agent) throw ConfigError("config: unknown recall_agent");
    c.recall_agent = *agent;
    return c;
}

inline RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

// Range and consistency checks that need no file system.
inline void check_config(const RunConfig& c) {
    if (c.max_steps < 1) throw ConfigError("max_steps must be at least 1");
    if (c.k < 1) throw ConfigError("k must be at least 1");
    if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
    if (c.backend.kind != "oracle" && c.backend.kind != "http") throw ConfigError("backend kind must be oracle or http");
    if (c.backend.kind == "http" && c.backend.endpoint.empty()) throw ConfigError("http backend needs an endpoint");
    if (c.similarity.kind != "trigram" && c.similarity.kind != "sidecar") throw ConfigError("similarity must be trigram or sidecar");
    if (c.similarity.kind == "sidecar" && c.similarity.endpoint.empty()) throw ConfigError("sidecar similarity needs an endpoint");
    if (c.retriever.kind != "lexical" && c.retriever.kind != "dense") throw ConfigError("retriever must be lexical or dense");
    if (c.retriever.kind == "dense" && c.retriever.endpoint.empty()) throw ConfigError("dense retriever needs an endpoint");
    make_tokenizer(c.tokenizer);
}

inline void require_path(const fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string(what) + " is not set");
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

// Settings that decide results, in a fixed key order. Scheduling (jobs) and output
// location are left out.
inline nlohmann::ordered_json canonical_config(const RunConfig& c) {
    auto name = [](const fs::path& p) { return p.empty() ? std::string() : p.filename().string(); };
    nlohmann::ordered_json backend = {{"kind", c.backend.kind}};
    if (c.backend.kind == "http") {
        backend["endpoint"] = c.backend.endpoint;
        backend["model"] = c.backend.generate.model;
        backend["temperature"] = c.backend.generate.temperature;
        backend["max_tokens"] = c.backend.generate.max_tokens;
        if (c.backend.generate.seed) backend["seed"] = *c.backend.generate.seed;
    }
    return {{"dataset", name(c.dataset)},
            {"device_states", name(c.device_states)},
            {"catalog", c.catalog.empty() ? std::string("default") : name(c.catalog)},
            {"backend", backend},
            {"prompt_mode", to_id(c.prompt_mode)},
            {"k", c.k},
            {"max_steps", c.max_steps},
            {"include_instruction", c.include_instruction},
            {"baseline_mode", c.baseline_mode},
            {"similarity", {{"kind", c.similarity.kind}, {"endpoint", c.similarity.endpoint}}},
            {"retriever", {{"kind", c.retriever.kind}, {"endpoint", c.retriever.endpoint}}},
            {"tokenizer", c.tokenizer},
            {"threshold", c.threshold},
            {"averaging", to_id(c.averaging)},
            {"seed", c.seed}};
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(canonical_config(c).dump())); }

} // namespace camphor
