#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/eval/similarity.hpp"
#include "camphor/prompt/embedding.hpp"
#include "camphor/retrieval/retriever.hpp"
#include "camphor/runtime/backend.hpp"
#include "camphor/runtime/http_client.hpp"

namespace camphor {

/*
 * Client for the model sidecar.
 *
 *   POST /embed           {"texts": [...]}                    -> {"model": id, "vectors": [[...], ...]}
 *   POST /embed_function  {"texts": [...]}                    -> {"model": id, "vectors": [[...], ...]}
 *   POST /generate        {"model"?, "messages": [{"role", "content"}], "temperature", "max_tokens", "seed"}
 *                                                             -> {"model": id, "completion": text, "usage": {...}}
 *
 * /generate also accepts a chat-completions body: {"choices": [{"message": {"content": text}}]}.
 */
struct EmbedResponse {
    std::string model;
    std::vector<Embedding> vectors;
};

struct GenerateParams {
    std::string model; // omitted from the request when empty
    double temperature = 0.0;
    int max_tokens = 256;
    std::optional<std::uint64_t> seed;
};

class SidecarClient {
public:
    SidecarClient(HttpEndpoint endpoint, HttpOptions options) : endpoint_(std::move(endpoint)), options_(std::move(options)) {}
    explicit SidecarClient(std::string_view url, HttpOptions options = {}) : SidecarClient(HttpEndpoint::parse(url), std::move(options)) {}

    const HttpEndpoint& endpoint() const noexcept { return endpoint_; }

    EmbedResponse embed(const std::vector<std::string>& texts) const { return embed_route("/embed", texts); }
    EmbedResponse embed_function(const std::vector<std::string>& texts) const { return embed_route("/embed_function", texts); }

    std::string generate(const std::vector<ChatMessage>& messages, const GenerateParams& params) const {
        nlohmann::json msgs = nlohmann::json::array();
        for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
        nlohmann::json body = {{"messages", msgs}, {"temperature", params.temperature}, {"max_tokens", params.max_tokens}};
        if (!params.model.empty()) body["model"] = params.model;
        if (params.seed) body["seed"] = *params.seed;
        return completion_of(post_json(endpoint_, "/generate", body, options_));
    }

    // Completion text from either response shape.
    static std::string completion_of(const nlohmann::json& res) {
        using Kind = BackendTransportError::Kind;
        try {
            if (res.contains("completion")) return res.at("completion").get<std::string>();
            if (res.contains("choices")) {
                const auto& choice = res.at("choices").at(0);
                if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
                return choice.at("text").get<std::string>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw BackendTransportError(Kind::MalformedBody, e.what());
        }
        throw BackendTransportError(Kind::MalformedBody, "response has neither 'completion' nor 'choices'");
    }

private:
    EmbedResponse embed_route(std::string_view route, const std::vector<std::string>& texts) const {
        using Kind = BackendTransportError::Kind;
        auto res = post_json(endpoint_, route, {{"texts", texts}}, options_);
        EmbedResponse out;
        try {
            out.model = res.value("model", "");
            for (const auto& v : res.at("vectors")) out.vectors.push_back(v.get<Embedding>());
        } catch (const nlohmann::json::exception& e) {
            throw BackendTransportError(Kind::MalformedBody, e.what());
        }
        if (out.vectors.size() != texts.size()) {
            throw BackendTransportError(Kind::MalformedBody,
                                        std::to_string(texts.size()) + " texts sent, " + std::to_string(out.vectors.size()) + " vectors returned");
        }
        for (const auto& v : out.vectors) {
            if (v.size() != out.vectors.front().size()) throw BackendTransportError(Kind::MalformedBody, "vector widths differ");
        }
        return out;
    }

    HttpEndpoint endpoint_;
    HttpOptions options_;
};

inline double cosine(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) throw Error("cosine of vectors with different widths");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace detail {

// Per-text /embed results, fetched on first use.
class SentenceVectors {
public:
    explicit SentenceVectors(const SidecarClient& client) : client_(&client) {}

    std::vector<Embedding> get(const std::vector<std::string>& texts) const {
        std::vector<std::string> missing;
        {
            std::lock_guard lock(mutex_);
            for (const auto& t : texts) {
                if (!cache_.count(t)) missing.push_back(t);
            }
        }
        if (!missing.empty()) {
            EmbedResponse res;
            try {
                res = client_->embed(missing);
            } catch (const BackendError& e) {
                throw ProviderUnavailable(std::string("sidecar /embed: ") + e.what());
            }
            std::lock_guard lock(mutex_);
            for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(res.vectors[i]));
        }
        std::vector<Embedding> out;
        std::lock_guard lock(mutex_);
        for (const auto& t : texts) out.push_back(cache_.at(t));
        return out;
    }

private:
    const SidecarClient* client_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, Embedding> cache_;
};

} // namespace detail

// Cosine of sentence embeddings, clamped to [0, 1].
class SidecarSimilarity final : public SimilarityProvider {
public:
    explicit SidecarSimilarity(const SidecarClient& client) : client_(&client), vectors_(client) {}

    std::string id() const override { return "sidecar:" + client_->endpoint().origin; }

    double similarity(std::string_view a, std::string_view b) const override {
        if (a == b) return 1.0;
        auto v = vectors_.get({std::string(a), std::string(b)});
        return std::clamp(cosine(v[0], v[1]), 0.0, 1.0);
    }

private:
    const SidecarClient* client_;
    detail::SentenceVectors vectors_;
};

// Last-token embeddings of tool definitions from /embed_function.
class SidecarFunctionEmbedder final : public FunctionEmbeddingProvider {
public:
    explicit SidecarFunctionEmbedder(const SidecarClient& client) : client_(&client) {}

    std::string id() const override { return "sidecar-function:" + client_->endpoint().origin; }

    std::size_t width() const override {
        std::lock_guard lock(mutex_);
        return width_;
    }

    Embedding embed(std::string_view text) const override {
        EmbedResponse res;
        try {
            res = client_->embed_function({std::string(text)});
        } catch (const BackendError& e) {
            throw ProviderUnavailable(std::string("sidecar /embed_function: ") + e.what());
        }
        std::lock_guard lock(mutex_);
        if (width_ == 0) width_ = res.vectors[0].size();
        if (res.vectors[0].size() != width_) throw ProviderUnavailable("sidecar /embed_function changed vector width");
        return std::move(res.vectors[0]);
    }

private:
    const SidecarClient* client_;
    mutable std::mutex mutex_;
    mutable std::size_t width_ = 0;
};

// Query-definition cosine over sidecar sentence embeddings.
class DenseRetriever final : public Retriever {
public:
    explicit DenseRetriever(const SidecarClient& client) : client_(&client), vectors_(client) {}

    std::string id() const override { return "dense:" + client_->endpoint().origin; }

    std::vector<double> score(std::string_view query, const std::vector<ToolDefinition>& candidates) const override {
        std::vector<std::string> texts{std::string(query)};
        for (const auto& c : candidates) texts.push_back(c.definition_text());
        auto v = vectors_.get(texts);
        std::vector<double> out;
        for (std::size_t i = 1; i < v.size(); ++i) out.push_back(cosine(v[0], v[i]));
        return out;
    }

private:
    const SidecarClient* client_;
    detail::SentenceVectors vectors_;
};

// Backend that posts each rendered prompt to /generate.
class HttpBackend final : public AgentBackend {
public:
    HttpBackend(SidecarClient client, GenerateParams params) : client_(std::move(client)), params_(std::move(params)) {}

    std::string complete(const BackendRequest& request) override { return client_.generate(request.messages, params_); }

private:
    SidecarClient client_;
    GenerateParams params_;
};

} // namespace camphor
