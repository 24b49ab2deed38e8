#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "camphor/error.hpp"
#include "camphor/tools/catalog.hpp"

namespace camphor {

using Embedding = std::vector<float>;

// Tool definition text to the single vector that stands in for it in a compressed prompt.
class FunctionEmbeddingProvider {
public:
    virtual ~FunctionEmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::size_t width() const = 0;
    virtual Embedding embed(std::string_view definition_text) const = 0;
};

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic stand-in: a seeded Gaussian projection of hashed character trigrams,
// L2-normalized.
class HashProjectionProvider final : public FunctionEmbeddingProvider {
public:
    explicit HashProjectionProvider(std::uint64_t seed = 0, std::size_t width = 64) : seed_(seed), width_(width) {
        if (width_ == 0) throw ConfigError("embedding width must be positive");
    }

    std::string id() const override { return "hash-projection/" + std::to_string(seed_) + "/" + std::to_string(width_); }
    std::size_t width() const override { return width_; }

    Embedding embed(std::string_view text) const override {
        std::vector<double> acc(width_, 0.0);
        std::string padded = "^" + std::string(text) + "$";
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
            std::mt19937_64 rng(fnv1a64(std::string_view(padded).substr(i, 3), seed_ ^ 0x9e3779b97f4a7c15ULL));
            std::normal_distribution<double> gauss;
            for (auto& a : acc) a += gauss(rng);
        }
        double norm = 0.0;
        for (double a : acc) norm += a * a;
        norm = std::sqrt(norm);
        Embedding out(width_, 0.0f);
        if (norm > 0) {
            for (std::size_t i = 0; i < width_; ++i) out[i] = static_cast<float>(acc[i] / norm);
        }
        return out;
    }

private:
    std::uint64_t seed_;
    std::size_t width_;
};

// Embeddings keyed by (provider id, definition text). Concurrent readers; one writer
// at a time inserts.
class EmbeddingCache {
public:
    Embedding get_or_compute(const FunctionEmbeddingProvider& provider, std::string_view text) {
        auto key = std::make_pair(provider.id(), std::string(text));
        {
            std::shared_lock lock(mutex_);
            auto it = entries_.find(key);
            if (it != entries_.end()) return it->second;
        }
        Embedding v = provider.embed(text);
        std::unique_lock lock(mutex_);
        return entries_.try_emplace(std::move(key), std::move(v)).first->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::pair<std::string, std::string>, Embedding> entries_;
};

inline Embedding embed_function(std::string_view definition_text, const FunctionEmbeddingProvider& provider, EmbeddingCache* cache = nullptr) {
    return cache ? cache->get_or_compute(provider, definition_text) : provider.embed(definition_text);
}

// Slot embeddings for a compressed prompt, in slot order.
inline std::vector<Embedding> embed_tools(const std::vector<ToolDefinition>& tools, const FunctionEmbeddingProvider& provider,
                                          EmbeddingCache* cache = nullptr) {
    std::vector<Embedding> out;
    out.reserve(tools.size());
    for (const auto& t : tools) out.push_back(embed_function(t.definition_text(), provider, cache));
    return out;
}

} // namespace camphor
