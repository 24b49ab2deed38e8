#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <thread>

#include <unistd.h>

#include "camphor/data/fixtures.hpp"

namespace camphor::test {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return CAMPHOR_FIXTURE_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("camphor-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

// The generated fixture set, built once per process.
inline const fixtures::FixtureSet& fixture_set() {
    static const fixtures::FixtureSet f = fixtures::generate(7, default_catalog());
    return f;
}

inline const DeviceState& barcelona() {
    static const DeviceState s = fixtures::barcelona_state(default_catalog());
    return s;
}

inline FunctionCall call(std::string name, std::vector<Argument> args = {}) { return {std::move(name), std::move(args)}; }

} // namespace camphor::test
