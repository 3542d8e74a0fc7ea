#pragma once

#include "presuppose/core.hpp"
#include "presuppose/strategies/strategies.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace presuppose::app {

struct LlmProfile {
    std::string provider = "scripted";  // scripted | http
    std::filesystem::path script;       // fingerprint -> response JSON
    std::string model = "mock";
    std::string base_url;               // PRESUPPOSE_API_BASE
    std::string api_key;                // PRESUPPOSE_API_KEY, never written out
    int timeout_s = 120;
    std::filesystem::path templates;    // directory of <name>.txt overrides
    std::filesystem::path record;       // write the session as a replayable script
};

struct SearchProfile {
    std::string provider = "none";  // none | fixture | http
    std::filesystem::path fixture;
    std::string url_template;       // empty: built-in Custom Search URL
    std::string engine_id;
    std::string api_key;            // PRESUPPOSE_SEARCH_KEY
    int per_host_limit = 2;
    int timeout_s = 30;
};

struct EmbedderProfile {
    std::string provider = "lexical";  // lexical | http
    std::string url;
    std::string api_key;               // PRESUPPOSE_EMBED_KEY
    int batch_size = 64;
};

struct VerifierProfile {
    std::string provider = "none";  // none | scripted | http
    std::filesystem::path script;
    std::string url;
    std::string api_key;            // PRESUPPOSE_VERIFIER_KEY
};

struct RunConfig {
    strategies::StrategyConfig strategy;
    LlmProfile llm;
    SearchProfile search;
    EmbedderProfile embedder;
    VerifierProfile verifier;
    int concurrency = 4;
    std::filesystem::path cache_dir;  // PRESUPPOSE_CACHE_DIR; empty disables caching
    std::filesystem::path dataset;
    Corpus corpus = Corpus::kCustom;
    std::filesystem::path output;
    // Offline determinism: only scripted and fixture providers are allowed.
    bool mock = false;

    // Checks ranges, provider names and mock-mode restrictions. With
    // `need_paths`, the dataset and every referenced input file must exist.
    void validate(bool need_paths) const;

    // Effective configuration in the same INI dialect, secrets omitted.
    std::string to_ini() const;
};

class ConfigError : public ContractError {
public:
    using ContractError::ContractError;
};

// Sets one "section.key" (or section + key) value. Relative paths resolve
// against `base`.
void set_option(RunConfig& cfg, std::string_view section, std::string_view key, const std::string& value,
                const std::filesystem::path& base);

// INI text -> config. Relative paths resolve against `base`.
void apply_ini(RunConfig& cfg, const std::string& ini_text, const std::filesystem::path& base);

// "section.key=value" strings; relative paths resolve against the working
// directory.
void apply_overrides(RunConfig& cfg, std::span<const std::string> overrides);

// Reads PRESUPPOSE_API_BASE, PRESUPPOSE_API_KEY, PRESUPPOSE_SEARCH_KEY,
// PRESUPPOSE_EMBED_KEY, PRESUPPOSE_VERIFIER_KEY and PRESUPPOSE_CACHE_DIR.
// Values already set by file or flags win, except keys, which only come
// from the environment.
void apply_environment(RunConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_environment();

// File (optional), then overrides, then environment.
RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      std::span<const std::string> overrides,
                      const std::map<std::string, std::string>& env = process_environment());

}  // namespace presuppose::app
