#pragma once

#include "presuppose/llm/llm.hpp"
#include "presuppose/retrieval/retrieval.hpp"
#include "presuppose/strategies/strategies.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>

namespace presuppose::app {

// Directory of immutable JSON entries, one file per key. Writes go to a
// temporary file that is renamed into place, so concurrent writers and
// readers never see partial entries.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<nlohmann::json> get(const std::string& key) const;
    // Stores {"key", "created_at", "value"}; an existing entry is kept.
    void put(const std::string& key, const nlohmann::json& value) const;

    std::filesystem::path path_for(const std::string& key) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

// Content hash of a namespaced key tuple.
std::string cache_key(std::string_view kind, const nlohmann::json& parts);

// Each decorator consults the cache before calling the inner provider and
// counts how often it had to.
class CachingCompletionProvider : public llm::CompletionProvider {
public:
    CachingCompletionProvider(llm::CompletionProvider& inner, const ResponseCache& cache)
        : inner_(inner), cache_(cache)
    {
    }
    llm::CompletionResponse complete(const llm::CompletionRequest& request) override;
    std::int64_t misses() const { return misses_; }
    std::int64_t hits() const { return hits_; }

private:
    llm::CompletionProvider& inner_;
    const ResponseCache& cache_;
    std::atomic<std::int64_t> misses_{0};
    std::atomic<std::int64_t> hits_{0};
};

class CachingSearchProvider : public retrieval::SearchProvider {
public:
    CachingSearchProvider(retrieval::SearchProvider& inner, const ResponseCache& cache)
        : inner_(inner), cache_(cache)
    {
    }
    std::vector<retrieval::SearchHit> search(const std::string& query) override;
    std::int64_t misses() const { return misses_; }

private:
    retrieval::SearchProvider& inner_;
    const ResponseCache& cache_;
    std::atomic<std::int64_t> misses_{0};
};

class CachingPageFetcher : public retrieval::PageFetcher {
public:
    CachingPageFetcher(retrieval::PageFetcher& inner, const ResponseCache& cache)
        : inner_(inner), cache_(cache)
    {
    }
    std::string fetch(const std::string& url) override;
    std::int64_t misses() const { return misses_; }

private:
    retrieval::PageFetcher& inner_;
    const ResponseCache& cache_;
    std::atomic<std::int64_t> misses_{0};
};

// Caches per input text, so overlapping batches reuse vectors.
class CachingEmbeddingProvider : public retrieval::EmbeddingProvider {
public:
    CachingEmbeddingProvider(retrieval::EmbeddingProvider& inner, const ResponseCache& cache)
        : inner_(inner), cache_(cache)
    {
    }
    std::vector<std::vector<double>> embed(std::span<const retrieval::InstructedText> inputs) override;
    std::int64_t misses() const { return misses_; }

private:
    retrieval::EmbeddingProvider& inner_;
    const ResponseCache& cache_;
    std::atomic<std::int64_t> misses_{0};
};

class CachingVerifier : public strategies::VerifierProvider {
public:
    CachingVerifier(strategies::VerifierProvider& inner, const ResponseCache& cache)
        : inner_(inner), cache_(cache)
    {
    }
    double support_probability(const std::string& document, const std::string& claim) override;
    std::int64_t misses() const { return misses_; }

private:
    strategies::VerifierProvider& inner_;
    const ResponseCache& cache_;
    std::atomic<std::int64_t> misses_{0};
};

}  // namespace presuppose::app
