#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/error.hpp"
#include "camphor/runtime/trajectory.hpp"

namespace camphor {

// A line of a JSONL file that could not be read as a trajectory.
struct LineError {
    std::size_t line = 0;
    std::string message;
};

struct LoadedDataset {
    std::vector<Trajectory> trajectories;
    std::vector<std::size_t> lines; // source line of each trajectory
    std::vector<LineError> errors;
};

// Reads every non-blank line, collecting per-line failures instead of stopping.
inline LoadedDataset read_dataset(std::istream& in) {
    LoadedDataset out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto doc = ordered_json::parse(text);
            if (doc.contains("format_version") && doc["format_version"] != kFormatVersion) {
                throw Error("unsupported format_version " + doc["format_version"].dump());
            }
            out.trajectories.push_back(trajectory_from_json(doc));
            out.lines.push_back(line);
        } catch (const std::exception& e) {
            out.errors.push_back({line, e.what()});
        }
    }
    return out;
}

inline LoadedDataset read_dataset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data set: " + path.string());
    return read_dataset(in);
}

// Strict load: the first bad line is an error carrying file and line.
inline std::vector<Trajectory> load_dataset(const std::filesystem::path& path) {
    auto loaded = read_dataset_file(path);
    if (!loaded.errors.empty()) {
        const auto& e = loaded.errors.front();
        throw Error(path.string() + ":" + std::to_string(e.line) + ": " + e.message);
    }
    return std::move(loaded.trajectories);
}

inline std::string dataset_to_jsonl(const std::vector<Trajectory>& data) {
    std::string out;
    for (const auto& t : data) {
        out += trajectory_to_json(t).dump();
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void save_dataset(const std::filesystem::path& path, const std::vector<Trajectory>& data) {
    write_text_file(path, dataset_to_jsonl(data));
}

} // namespace camphor
