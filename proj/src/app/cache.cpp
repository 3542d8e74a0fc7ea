#include "presuppose/app/cache.hpp"

#include "presuppose/hash.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace presuppose::app {

using nlohmann::json;

namespace {

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string temp_suffix()
{
    thread_local std::mt19937_64 rng(std::random_device{}());
    std::ostringstream out;
    out << ".tmp." << std::hex << rng();
    return out.str();
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const
{
    return dir_ / (key + ".json");
}

std::optional<json> ResponseCache::get(const std::string& key) const
{
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in)
        return std::nullopt;
    try {
        auto entry = json::parse(in);
        if (!entry.contains("value"))
            return std::nullopt;
        return entry.at("value");
    } catch (const json::exception&) {
        // Treated as a miss; the next put() replaces it.
        return std::nullopt;
    }
}

void ResponseCache::put(const std::string& key, const json& value) const
{
    const auto target = path_for(key);
    if (std::filesystem::exists(target) && get(key))
        return;
    const json entry = {{"key", key}, {"created_at", utc_now()}, {"value", value}};
    auto tmp = target;
    tmp += temp_suffix();
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw Error("cannot write cache entry " + tmp.string());
        out << entry.dump() << '\n';
    }
    std::filesystem::rename(tmp, target);
}

std::string cache_key(std::string_view kind, const json& parts)
{
    return sha256_hex(json::array({std::string(kind), parts}).dump());
}

llm::CompletionResponse CachingCompletionProvider::complete(const llm::CompletionRequest& request)
{
    const auto key = llm::fingerprint(request);
    if (const auto hit = cache_.get(key)) {
        try {
            llm::CompletionResponse r;
            r.text = hit->at("text").get<std::string>();
            r.usage.prompt_tokens = hit->at("prompt_tokens").get<std::int64_t>();
            r.usage.completion_tokens = hit->at("completion_tokens").get<std::int64_t>();
            r.usage.estimated = hit->value("estimated", false);
            r.usage.llm_calls = 1;
            ++hits_;
            return r;
        } catch (const json::exception&) {
            // fall through to the provider
        }
    }
    ++misses_;
    auto response = inner_.complete(request);
    cache_.put(key, json{{"text", response.text},
                         {"prompt_tokens", response.usage.prompt_tokens},
                         {"completion_tokens", response.usage.completion_tokens},
                         {"estimated", response.usage.estimated}});
    return response;
}

std::vector<retrieval::SearchHit> CachingSearchProvider::search(const std::string& query)
{
    const auto key = cache_key("search", query);
    if (const auto hit = cache_.get(key)) {
        try {
            std::vector<retrieval::SearchHit> hits;
            for (const auto& h : hit->at("hits"))
                hits.push_back(retrieval::SearchHit{h.at("url").get<std::string>(),
                                                    h.value("title", std::string())});
            return hits;
        } catch (const json::exception&) {
        }
    }
    ++misses_;
    auto hits = inner_.search(query);
    json value = {{"hits", json::array()}};
    for (const auto& h : hits)
        value["hits"].push_back({{"url", h.url}, {"title", h.title}});
    cache_.put(key, value);
    return hits;
}

std::string CachingPageFetcher::fetch(const std::string& url)
{
    const auto key = cache_key("page", url);
    if (const auto hit = cache_.get(key); hit && hit->contains("html") && hit->at("html").is_string())
        return hit->at("html").get<std::string>();
    ++misses_;
    auto html = inner_.fetch(url);
    cache_.put(key, json{{"html", html}});
    return html;
}

std::vector<std::vector<double>> CachingEmbeddingProvider::embed(
    std::span<const retrieval::InstructedText> inputs)
{
    std::vector<std::vector<double>> out(inputs.size());
    std::vector<std::size_t> missing;
    std::vector<std::string> keys;
    keys.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        keys.push_back(cache_key("embedding", json::array({inputs[i].instruction, inputs[i].text})));
        bool found = false;
        if (const auto hit = cache_.get(keys.back())) {
            try {
                out[i] = hit->at("vector").get<std::vector<double>>();
                found = true;
            } catch (const json::exception&) {
            }
        }
        if (!found)
            missing.push_back(i);
    }
    if (missing.empty())
        return out;
    ++misses_;
    std::vector<retrieval::InstructedText> batch;
    batch.reserve(missing.size());
    for (auto i : missing)
        batch.push_back(inputs[i]);
    auto vectors = inner_.embed(batch);
    if (vectors.size() != batch.size())
        throw net::BadResponseError("embedder returned the wrong number of vectors");
    for (std::size_t j = 0; j < missing.size(); ++j) {
        cache_.put(keys[missing[j]], json{{"vector", vectors[j]}});
        out[missing[j]] = std::move(vectors[j]);
    }
    return out;
}

double CachingVerifier::support_probability(const std::string& document, const std::string& claim)
{
    const auto key = cache_key("verify", json::array({document, claim}));
    if (const auto hit = cache_.get(key); hit && hit->contains("probability") &&
                                          hit->at("probability").is_number())
        return hit->at("probability").get<double>();
    ++misses_;
    const double p = inner_.support_probability(document, claim);
    cache_.put(key, json{{"probability", p}});
    return p;
}

}  // namespace presuppose::app
