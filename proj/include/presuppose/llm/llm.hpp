#pragma once

#include "presuppose/core.hpp"
#include "presuppose/net/provider_error.hpp"
#include "presuppose/net/retry.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace presuppose::llm {

// Sampling settings. Defaults:
// temperature 0.1, top_p 0.1, no frequency penalty; 4 tokens for yes/no
// labelling and 512 for generation.
struct GenerationParams {
    double temperature = 0.1;
    double top_p = 0.1;
    double frequency_penalty = 0.0;
    int max_tokens = 512;

    static constexpr int kLabelMaxTokens = 4;
    static constexpr int kGenerativeMaxTokens = 512;

    static GenerationParams for_label() { return GenerationParams{.max_tokens = kLabelMaxTokens}; }
    static GenerationParams for_generation() { return GenerationParams{}; }

    // Throws ContractError when out of range.
    void validate() const;

    friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

struct CompletionRequest {
    std::string system_text;
    std::string user_text;
    GenerationParams params;
    std::string model_id;
};

struct CompletionResponse {
    std::string text;
    UsageRecord usage;  // llm_calls == 1
};

// Hex SHA-256 over (model_id, params, system_text, user_text) with CRLF and
// lone CR normalized to LF.
std::string fingerprint(const CompletionRequest& request);

// ceil(code points / 4); the fallback when a provider reports no usage.
std::int64_t estimate_tokens(std::string_view text);

// Usage for a completion whose provider reported nothing.
UsageRecord estimated_usage(const CompletionRequest& request, std::string_view completion);

// Raised by the scripted provider for a request it has no answer for.
class MissingScriptError : public net::ProviderError {
public:
    explicit MissingScriptError(std::string fp)
        : ProviderError("no scripted response for fingerprint " + fp, false),
          fingerprint_(std::move(fp))
    {
    }
    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::string fingerprint_;
};

// Completion contract. Implementations must tolerate concurrent complete()
// calls.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

struct ScriptEntry {
    std::string text;
    std::optional<std::int64_t> prompt_tokens;
    std::optional<std::int64_t> completion_tokens;
};

// Deterministic mock: answers are looked up by request fingerprint.
//
// Script JSON is an object mapping fingerprint to either the response text or
// {"text": ..., "prompt_tokens": n, "completion_tokens": n}. Entries without
// token counts get estimated usage.
class ScriptedProvider : public CompletionProvider {
public:
    explicit ScriptedProvider(std::map<std::string, ScriptEntry> script);

    static ScriptedProvider from_json(const nlohmann::json& script);
    static ScriptedProvider from_file(const std::filesystem::path& path);

    CompletionResponse complete(const CompletionRequest& request) override;

    std::size_t size() const { return script_.size(); }

private:
    std::map<std::string, ScriptEntry> script_;
};

// Serializes a script in the format ScriptedProvider reads.
nlohmann::json script_to_json(const std::map<std::string, ScriptEntry>& script);

// Answers through a callback; used to author sessions programmatically.
class CallbackProvider : public CompletionProvider {
public:
    using Callback = std::function<ScriptEntry(const CompletionRequest&)>;
    explicit CallbackProvider(Callback callback) : callback_(std::move(callback)) {}

    CompletionResponse complete(const CompletionRequest& request) override;

private:
    Callback callback_;
};

// Passes through to an inner provider and records every exchange, so a live
// or authored session can be replayed bit-identically with ScriptedProvider.
class RecordingProvider : public CompletionProvider {
public:
    explicit RecordingProvider(CompletionProvider& inner) : inner_(inner) {}

    CompletionResponse complete(const CompletionRequest& request) override;

    std::map<std::string, ScriptEntry> script() const;

private:
    CompletionProvider& inner_;
    mutable std::mutex mutex_;
    std::map<std::string, ScriptEntry> script_;
};

// Accumulates usage over every successful completion of the inner provider.
class MeteredProvider : public CompletionProvider {
public:
    explicit MeteredProvider(CompletionProvider& inner) : inner_(inner) {}

    CompletionResponse complete(const CompletionRequest& request) override;

    UsageRecord totals() const;

private:
    CompletionProvider& inner_;
    std::atomic<std::int64_t> prompt_tokens_{0};
    std::atomic<std::int64_t> completion_tokens_{0};
    std::atomic<std::int64_t> calls_{0};
    std::atomic<bool> estimated_{false};
};

struct HttpChatConfig {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string api_key;
    std::chrono::seconds timeout{120};
    net::RetryPolicy retry;

    // Reads PRESUPPOSE_API_BASE and PRESUPPOSE_API_KEY.
    static HttpChatConfig from_environment();
};

// OpenAI-style POST {base_url}/chat/completions.
class HttpChatProvider : public CompletionProvider {
public:
    explicit HttpChatProvider(HttpChatConfig config, net::Sleeper sleeper = net::real_sleep);

    CompletionResponse complete(const CompletionRequest& request) override;

    // Request payload, exposed for tests.
    static nlohmann::json request_body(const CompletionRequest& request);

private:
    HttpChatConfig config_;
    net::Sleeper sleeper_;
};

}  // namespace presuppose::llm
