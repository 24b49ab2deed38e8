#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "camphor/data/dataset.hpp"
#include "camphor/harness/config.hpp"

namespace camphor {

inline constexpr std::string_view kVersion = "1.0.0";

struct FileEntry {
    std::string path; // relative to the output directory
    std::string fnv1a64;
    std::size_t bytes = 0;
};

// What a command read, wrote, and how long each stage took.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<FileEntry> inputs;
    std::vector<FileEntry> outputs;
    std::vector<std::pair<std::string, double>> timings_ms;
};

inline FileEntry file_entry(const fs::path& file, const fs::path& relative_to = {}) {
    std::string text = read_text_file(file);
    std::string shown = relative_to.empty() ? file.filename().string() : fs::relative(file, relative_to).generic_string();
    return {shown, hex64(fnv1a64(text)), text.size()};
}

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    auto files = [](const std::vector<FileEntry>& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& f : v) a.push_back({{"path", f.path}, {"fnv1a64", f.fnv1a64}, {"bytes", f.bytes}});
        return a;
    };
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    for (const auto& [stage, ms] : m.timings_ms) timings[stage] = ms;
    return {{"format_version", kFormatVersion},
            {"command", m.command},
            {"config_hash", m.config_hash},
            {"seed", m.seed},
            {"versions",
             {{"camphor", kVersion},
              {"nlohmann_json",
               std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cpp_httplib", CPPHTTPLIB_VERSION}}},
            {"inputs", files(m.inputs)},
            {"outputs", files(m.outputs)},
            {"timings_ms", timings}};
}

// Wall-clock timer for manifest stages.
class StageTimer {
public:
    explicit StageTimer(RunManifest& m) : manifest_(&m), started_(std::chrono::steady_clock::now()) {}

    void lap(std::string stage) {
        auto now = std::chrono::steady_clock::now();
        manifest_->timings_ms.emplace_back(std::move(stage), std::chrono::duration<double, std::milli>(now - started_).count());
        started_ = now;
    }

private:
    RunManifest* manifest_;
    std::chrono::steady_clock::time_point started_;
};

} // namespace camphor
