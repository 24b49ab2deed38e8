#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "camphor/error.hpp"
#include "camphor/runtime/backend.hpp"

namespace camphor {

// "http://host:port/prefix" split into scheme-host-port and path prefix.
struct HttpEndpoint {
    std::string origin;
    std::string prefix;

    static HttpEndpoint parse(std::string_view url) {
        auto scheme = url.find("://");
        if (scheme == std::string_view::npos) throw ConfigError("endpoint needs a scheme: " + std::string(url));
        auto path = url.find('/', scheme + 3);
        HttpEndpoint e;
        e.origin = std::string(url.substr(0, path));
        if (path != std::string_view::npos) e.prefix = std::string(url.substr(path));
        while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
        return e;
    }

    std::string path(std::string_view route) const { return prefix + std::string(route); }
};

struct HttpOptions {
    double timeout_seconds = 30.0;
    int retries = 0;        // extra attempts after the first failure
    std::string auth_token; // sent as a bearer token when non-empty
};

inline constexpr const char* kAuthTokenEnv = "CAMPHOR_API_TOKEN";

inline std::string auth_token_from_env() {
    const char* v = std::getenv(kAuthTokenEnv);
    return v ? std::string(v) : std::string();
}

// POSTs a JSON body. Transport failures, timeouts and 5xx responses are retried;
// 4xx and unparsable bodies fail immediately. Each failure kind is reported distinctly.
inline nlohmann::json post_json(const HttpEndpoint& endpoint, std::string_view route, const nlohmann::json& body,
                                const HttpOptions& options) {
    using Kind = BackendTransportError::Kind;
    const auto whole = std::chrono::duration<double>(options.timeout_seconds);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(whole);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(whole - secs);
    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!options.auth_token.empty()) headers.emplace("Authorization", "Bearer " + options.auth_token);

    std::optional<BackendTransportError> last;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        httplib::Client client(endpoint.origin);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto started = std::chrono::steady_clock::now();
        auto res = client.Post(endpoint.path(route), headers, payload, "application/json");
        auto elapsed = std::chrono::steady_clock::now() - started;
        if (!res) {
            auto err = res.error();
            bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && elapsed >= whole * 0.9);
            last = BackendTransportError(timed_out ? Kind::Timeout : Kind::Transport,
                                         endpoint.origin + endpoint.path(route) + ": " + httplib::to_string(err));
            continue;
        }
        if (res->status != 200) {
            last = BackendTransportError(Kind::Status, "HTTP " + std::to_string(res->status) + ": " + res->body, res->status);
            if (res->status >= 500) continue;
            throw *last;
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw BackendTransportError(Kind::MalformedBody, e.what());
        }
    }
    throw *last;
}

} // namespace camphor
