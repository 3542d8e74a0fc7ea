#include "presuppose/llm/llm.hpp"

#include "presuppose/hash.hpp"
#include "presuppose/net/http.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace presuppose::llm {

using nlohmann::json;

void GenerationParams::validate() const
{
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw ContractError("temperature must be a finite value >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0))
        throw ContractError("top_p must be in (0, 1]");
    if (!std::isfinite(frequency_penalty))
        throw ContractError("frequency_penalty must be finite");
    if (max_tokens <= 0)
        throw ContractError("max_tokens must be positive");
}

namespace {

std::string normalize_newlines(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

}  // namespace

std::string fingerprint(const CompletionRequest& request)
{
    const json canonical = json::array({
        "presuppose-completion-v1",
        request.model_id,
        request.params.temperature,
        request.params.top_p,
        request.params.frequency_penalty,
        request.params.max_tokens,
        normalize_newlines(request.system_text),
        normalize_newlines(request.user_text),
    });
    return sha256_hex(canonical.dump());
}

std::int64_t estimate_tokens(std::string_view text)
{
    std::int64_t code_points = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80)
            ++code_points;
    }
    return (code_points + 3) / 4;
}

UsageRecord estimated_usage(const CompletionRequest& request, std::string_view completion)
{
    return UsageRecord{
        .prompt_tokens = estimate_tokens(request.system_text) + estimate_tokens(request.user_text),
        .completion_tokens = estimate_tokens(completion),
        .llm_calls = 1,
        .estimated = true,
    };
}

namespace {

CompletionResponse response_from_entry(const CompletionRequest& request, const ScriptEntry& entry)
{
    CompletionResponse response{.text = entry.text, .usage = {}};
    if (entry.prompt_tokens && entry.completion_tokens) {
        response.usage = UsageRecord{.prompt_tokens = *entry.prompt_tokens,
                                     .completion_tokens = *entry.completion_tokens,
                                     .llm_calls = 1};
    } else {
        response.usage = estimated_usage(request, entry.text);
        if (entry.prompt_tokens)
            response.usage.prompt_tokens = *entry.prompt_tokens;
        if (entry.completion_tokens)
            response.usage.completion_tokens = *entry.completion_tokens;
    }
    return response;
}

}  // namespace

ScriptedProvider::ScriptedProvider(std::map<std::string, ScriptEntry> script)
    : script_(std::move(script))
{
}

ScriptedProvider ScriptedProvider::from_json(const json& script)
{
    if (!script.is_object())
        throw ContractError("mock script must be a JSON object of fingerprint -> response");
    std::map<std::string, ScriptEntry> entries;
    for (const auto& [key, value] : script.items()) {
        ScriptEntry entry;
        if (value.is_string()) {
            entry.text = value.get<std::string>();
        } else if (value.is_object() && value.contains("text")) {
            entry.text = value.at("text").get<std::string>();
            if (value.contains("prompt_tokens"))
                entry.prompt_tokens = value.at("prompt_tokens").get<std::int64_t>();
            if (value.contains("completion_tokens"))
                entry.completion_tokens = value.at("completion_tokens").get<std::int64_t>();
        } else {
            throw ContractError("mock script entry '" + key + "' is neither text nor {\"text\": ...}");
        }
        entries.emplace(key, std::move(entry));
    }
    return ScriptedProvider(std::move(entries));
}

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractError("cannot open mock script " + path.string());
    json script;
    try {
        in >> script;
    } catch (const json::parse_error& e) {
        throw ContractError("mock script " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(script);
}

CompletionResponse ScriptedProvider::complete(const CompletionRequest& request)
{
    if (request.user_text.empty())
        throw ContractError("completion request has empty user text");
    auto fp = fingerprint(request);
    const auto it = script_.find(fp);
    if (it == script_.end())
        throw MissingScriptError(std::move(fp));
    return response_from_entry(request, it->second);
}

json script_to_json(const std::map<std::string, ScriptEntry>& script)
{
    json out = json::object();
    for (const auto& [fp, entry] : script) {
        if (!entry.prompt_tokens && !entry.completion_tokens) {
            out[fp] = entry.text;
            continue;
        }
        json obj = {{"text", entry.text}};
        if (entry.prompt_tokens)
            obj["prompt_tokens"] = *entry.prompt_tokens;
        if (entry.completion_tokens)
            obj["completion_tokens"] = *entry.completion_tokens;
        out[fp] = std::move(obj);
    }
    return out;
}

CompletionResponse CallbackProvider::complete(const CompletionRequest& request)
{
    return response_from_entry(request, callback_(request));
}

CompletionResponse RecordingProvider::complete(const CompletionRequest& request)
{
    auto response = inner_.complete(request);
    ScriptEntry entry{.text = response.text, .prompt_tokens = {}, .completion_tokens = {}};
    if (!response.usage.estimated) {
        entry.prompt_tokens = response.usage.prompt_tokens;
        entry.completion_tokens = response.usage.completion_tokens;
    }
    std::lock_guard lock(mutex_);
    script_.insert_or_assign(fingerprint(request), std::move(entry));
    return response;
}

std::map<std::string, ScriptEntry> RecordingProvider::script() const
{
    std::lock_guard lock(mutex_);
    return script_;
}

CompletionResponse MeteredProvider::complete(const CompletionRequest& request)
{
    auto response = inner_.complete(request);
    prompt_tokens_ += response.usage.prompt_tokens;
    completion_tokens_ += response.usage.completion_tokens;
    calls_ += response.usage.llm_calls;
    if (response.usage.estimated)
        estimated_ = true;
    return response;
}

UsageRecord MeteredProvider::totals() const
{
    return UsageRecord{.prompt_tokens = prompt_tokens_.load(),
                       .completion_tokens = completion_tokens_.load(),
                       .llm_calls = calls_.load(),
                       .estimated = estimated_.load()};
}

HttpChatConfig HttpChatConfig::from_environment()
{
    HttpChatConfig config;
    if (const char* base = std::getenv("PRESUPPOSE_API_BASE"))
        config.base_url = base;
    if (const char* key = std::getenv("PRESUPPOSE_API_KEY"))
        config.api_key = key;
    return config;
}

HttpChatProvider::HttpChatProvider(HttpChatConfig config, net::Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper))
{
    while (!config_.base_url.empty() && config_.base_url.back() == '/')
        config_.base_url.pop_back();
}

json HttpChatProvider::request_body(const CompletionRequest& request)
{
    json messages = json::array();
    if (!request.system_text.empty())
        messages.push_back({{"role", "system"}, {"content", request.system_text}});
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    return json{
        {"model", request.model_id},
        {"messages", std::move(messages)},
        {"temperature", request.params.temperature},
        {"top_p", request.params.top_p},
        {"frequency_penalty", request.params.frequency_penalty},
        {"max_tokens", request.params.max_tokens},
    };
}

CompletionResponse HttpChatProvider::complete(const CompletionRequest& request)
{
    if (request.user_text.empty())
        throw ContractError("completion request has empty user text");
    if (config_.base_url.empty())
        throw net::AuthError("no API base URL configured (PRESUPPOSE_API_BASE)");
    if (config_.api_key.empty())
        throw net::AuthError("no API key configured (PRESUPPOSE_API_KEY)");

    net::HttpOptions options;
    options.timeout = config_.timeout;
    options.headers["Authorization"] = "Bearer " + config_.api_key;
    const auto url = config_.base_url + "/chat/completions";
    const auto body = request_body(request).dump();

    return net::with_retry(
        [&] {
            const auto raw = net::http_post_json(url, body, options);
            json reply;
            try {
                reply = json::parse(raw.body);
                const auto& content = reply.at("choices").at(0).at("message").at("content");
                CompletionResponse response;
                response.text = content.is_null() ? std::string() : content.get<std::string>();
                if (reply.contains("usage") && reply["usage"].is_object() &&
                    reply["usage"].contains("prompt_tokens") &&
                    reply["usage"].contains("completion_tokens")) {
                    response.usage = UsageRecord{
                        .prompt_tokens = reply["usage"]["prompt_tokens"].get<std::int64_t>(),
                        .completion_tokens = reply["usage"]["completion_tokens"].get<std::int64_t>(),
                        .llm_calls = 1};
                } else {
                    response.usage = estimated_usage(request, response.text);
                }
                return response;
            } catch (const json::exception& e) {
                throw net::BadResponseError("malformed chat completion payload: " +
                                            std::string(e.what()));
            }
        },
        config_.retry, sleeper_);
}

}  // namespace presuppose::llm
