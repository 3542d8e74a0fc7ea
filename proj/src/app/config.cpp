#include "presuppose/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern char** environ;

namespace presuppose::app {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

[[noreturn]] void bad(std::string_view section, std::string_view key, const std::string& message)
{
    throw ConfigError("config " + std::string(section) + "." + std::string(key) + ": " + message);
}

int to_int(std::string_view section, std::string_view key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        bad(section, key, "expected an integer, got '" + value + "'");
    }
}

double to_double(std::string_view section, std::string_view key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        bad(section, key, "expected a number, got '" + value + "'");
    }
}

bool to_bool(std::string_view section, std::string_view key, const std::string& value)
{
    const auto v = lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    bad(section, key, "expected true or false, got '" + value + "'");
}

std::filesystem::path to_path(const std::string& value, const std::filesystem::path& base)
{
    if (value.empty())
        return {};
    std::filesystem::path p(value);
    if (p.is_relative() && !base.empty())
        p = base / p;
    return p.lexically_normal();
}

void one_of(std::string_view section, std::string_view key, const std::string& value,
            std::initializer_list<std::string_view> allowed)
{
    if (std::find(allowed.begin(), allowed.end(), value) != allowed.end())
        return;
    std::string list;
    for (auto a : allowed) {
        if (!list.empty())
            list += ", ";
        list += a;
    }
    bad(section, key, "'" + value + "' is not one of " + list);
}

}  // namespace

void set_option(RunConfig& cfg, std::string_view section, std::string_view key, const std::string& raw,
                const std::filesystem::path& base)
{
    const std::string value(trim(raw));
    auto wrap = [&](auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            bad(section, key, e.what());
        }
    };
    if (section == "strategy") {
        auto& s = cfg.strategy;
        if (key == "family")
            wrap([&] { s.family = strategies::family_from_string(value); });
        else if (key == "input_kind")
            wrap([&] { s.input_kind = input_kind_from_string(value); });
        else if (key == "evidence_mode")
            wrap([&] { s.evidence_mode = strategies::evidence_mode_from_string(value); });
        else if (key == "k")
            s.k = to_int(section, key, value);
        else if (key == "fv_threshold")
            s.fv_threshold = to_double(section, key, value);
        else if (key == "zero_shot")
            s.zero_shot = to_bool(section, key, value);
        else if (key == "shared_assumption_evidence")
            s.assumption_evidence_from_question = to_bool(section, key, value);
        else
            bad(section, key, "unknown key");
    } else if (section == "llm") {
        auto& l = cfg.llm;
        if (key == "provider") {
            one_of(section, key, value, {"scripted", "http"});
            l.provider = value;
        } else if (key == "script") {
            l.script = to_path(value, base);
        } else if (key == "model") {
            l.model = value;
        } else if (key == "base_url") {
            l.base_url = value;
        } else if (key == "timeout") {
            l.timeout_s = to_int(section, key, value);
        } else if (key == "templates") {
            l.templates = to_path(value, base);
        } else if (key == "record") {
            l.record = to_path(value, base);
        } else {
            bad(section, key, "unknown key");
        }
    } else if (section == "search") {
        auto& s = cfg.search;
        if (key == "provider") {
            one_of(section, key, value, {"none", "fixture", "http"});
            s.provider = value;
        } else if (key == "fixture") {
            s.fixture = to_path(value, base);
        } else if (key == "url_template") {
            s.url_template = value;
        } else if (key == "engine_id") {
            s.engine_id = value;
        } else if (key == "per_host_limit") {
            s.per_host_limit = to_int(section, key, value);
        } else if (key == "timeout") {
            s.timeout_s = to_int(section, key, value);
        } else {
            bad(section, key, "unknown key");
        }
    } else if (section == "embedder") {
        auto& e = cfg.embedder;
        if (key == "provider") {
            one_of(section, key, value, {"lexical", "http"});
            e.provider = value;
        } else if (key == "url") {
            e.url = value;
        } else if (key == "batch_size") {
            e.batch_size = to_int(section, key, value);
        } else {
            bad(section, key, "unknown key");
        }
    } else if (section == "verifier") {
        auto& v = cfg.verifier;
        if (key == "provider") {
            one_of(section, key, value, {"none", "scripted", "http"});
            v.provider = value;
        } else if (key == "script") {
            v.script = to_path(value, base);
        } else if (key == "url") {
            v.url = value;
        } else {
            bad(section, key, "unknown key");
        }
    } else if (section == "run") {
        if (key == "concurrency")
            cfg.concurrency = to_int(section, key, value);
        else if (key == "cache_dir")
            cfg.cache_dir = to_path(value, base);
        else if (key == "dataset")
            cfg.dataset = to_path(value, base);
        else if (key == "corpus")
            wrap([&] { cfg.corpus = corpus_from_string(value); });
        else if (key == "output")
            cfg.output = to_path(value, base);
        else if (key == "mock")
            cfg.mock = to_bool(section, key, value);
        else
            bad(section, key, "unknown key");
    } else {
        bad(section, key, "unknown section");
    }
}

void apply_ini(RunConfig& cfg, const std::string& ini_text, const std::filesystem::path& base)
{
    boost::property_tree::ptree tree;
    std::istringstream in(ini_text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [section, node] : tree) {
        if (node.empty())
            throw ConfigError("config: key '" + section + "' is outside any section");
        for (const auto& [key, leaf] : node)
            set_option(cfg, section, key, leaf.get_value<std::string>(), base);
    }
}

void apply_overrides(RunConfig& cfg, std::span<const std::string> overrides)
{
    const auto cwd = std::filesystem::current_path();
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        const auto dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ConfigError("override '" + o + "' is not of the form section.key=value");
        set_option(cfg, o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1), cwd);
    }
}

void apply_environment(RunConfig& cfg, const std::map<std::string, std::string>& env)
{
    auto get = [&env](const char* name) -> std::string {
        const auto it = env.find(name);
        return it == env.end() ? std::string() : it->second;
    };
    if (cfg.llm.base_url.empty())
        cfg.llm.base_url = get("PRESUPPOSE_API_BASE");
    cfg.llm.api_key = get("PRESUPPOSE_API_KEY");
    cfg.search.api_key = get("PRESUPPOSE_SEARCH_KEY");
    cfg.embedder.api_key = get("PRESUPPOSE_EMBED_KEY");
    cfg.verifier.api_key = get("PRESUPPOSE_VERIFIER_KEY");
    if (cfg.cache_dir.empty()) {
        const auto dir = get("PRESUPPOSE_CACHE_DIR");
        if (!dir.empty())
            cfg.cache_dir = std::filesystem::absolute(dir).lexically_normal();
    }
}

std::map<std::string, std::string> process_environment()
{
    std::map<std::string, std::string> out;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        const std::string entry(*e);
        if (entry.rfind("PRESUPPOSE_", 0) != 0)
            continue;
        const auto eq = entry.find('=');
        if (eq != std::string::npos)
            out[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return out;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      std::span<const std::string> overrides,
                      const std::map<std::string, std::string>& env)
{
    RunConfig cfg;
    if (file) {
        std::ifstream in(*file, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open config file " + file->string());
        std::ostringstream text;
        text << in.rdbuf();
        apply_ini(cfg, text.str(), std::filesystem::absolute(*file).parent_path());
    }
    apply_overrides(cfg, overrides);
    apply_environment(cfg, env);
    return cfg;
}

void RunConfig::validate(bool need_paths) const
{
    try {
        strategy.validate();
    } catch (const ContractError& e) {
        throw ConfigError(std::string("config strategy: ") + e.what());
    }
    if (concurrency < 1)
        throw ConfigError("config run.concurrency must be at least 1");
    if (search.per_host_limit < 1)
        throw ConfigError("config search.per_host_limit must be at least 1");
    if (embedder.batch_size < 1)
        throw ConfigError("config embedder.batch_size must be at least 1");
    if (mock) {
        if (llm.provider != "scripted")
            throw ConfigError("mock mode needs llm.provider = scripted");
        if (search.provider == "http")
            throw ConfigError("mock mode allows only the fixture search provider");
        if (embedder.provider != "lexical")
            throw ConfigError("mock mode needs embedder.provider = lexical");
        if (verifier.provider == "http")
            throw ConfigError("mock mode allows only the scripted verifier");
    }
    if (llm.provider == "http" && llm.base_url.empty())
        throw ConfigError("llm.provider = http needs llm.base_url or PRESUPPOSE_API_BASE");
    if (embedder.provider == "http" && embedder.url.empty())
        throw ConfigError("embedder.provider = http needs embedder.url");
    if (verifier.provider == "http" && verifier.url.empty())
        throw ConfigError("verifier.provider = http needs verifier.url");
    if (!need_paths)
        return;
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (p.empty())
            throw ConfigError(std::string(what) + " is not set");
        if (!std::filesystem::exists(p))
            throw ConfigError(std::string(what) + " " + p.string() + " does not exist");
    };
    must_exist(dataset, "run.dataset");
    if (llm.provider == "scripted" && !llm.script.empty())
        must_exist(llm.script, "llm.script");
    if (!llm.templates.empty())
        must_exist(llm.templates, "llm.templates");
    if (search.provider == "fixture")
        must_exist(search.fixture, "search.fixture");
    if (verifier.provider == "scripted")
        must_exist(verifier.script, "verifier.script");
}

std::string RunConfig::to_ini() const
{
    std::ostringstream out;
    auto b = [](bool v) { return v ? "true" : "false"; };
    out << "[strategy]\n"
        << "family = " << strategies::to_string(strategy.family) << '\n'
        << "input_kind = " << to_string(strategy.input_kind) << '\n'
        << "evidence_mode = " << strategies::to_string(strategy.evidence_mode) << '\n'
        << "k = " << strategy.k << '\n'
        << "fv_threshold = " << strategy.fv_threshold << '\n'
        << "zero_shot = " << b(strategy.zero_shot) << '\n'
        << "shared_assumption_evidence = " << b(strategy.assumption_evidence_from_question) << "\n\n";
    out << "[llm]\n"
        << "provider = " << llm.provider << '\n'
        << "script = " << llm.script.string() << '\n'
        << "model = " << llm.model << '\n'
        << "base_url = " << llm.base_url << '\n'
        << "timeout = " << llm.timeout_s << '\n'
        << "templates = " << llm.templates.string() << '\n'
        << "record = " << llm.record.string() << "\n\n";
    out << "[search]\n"
        << "provider = " << search.provider << '\n'
        << "fixture = " << search.fixture.string() << '\n'
        << "url_template = " << search.url_template << '\n'
        << "engine_id = " << search.engine_id << '\n'
        << "per_host_limit = " << search.per_host_limit << '\n'
        << "timeout = " << search.timeout_s << "\n\n";
    out << "[embedder]\n"
        << "provider = " << embedder.provider << '\n'
        << "url = " << embedder.url << '\n'
        << "batch_size = " << embedder.batch_size << "\n\n";
    out << "[verifier]\n"
        << "provider = " << verifier.provider << '\n'
        << "script = " << verifier.script.string() << '\n'
        << "url = " << verifier.url << "\n\n";
    out << "[run]\n"
        << "concurrency = " << concurrency << '\n'
        << "cache_dir = " << cache_dir.string() << '\n'
        << "dataset = " << dataset.string() << '\n'
        << "corpus = " << to_string(corpus) << '\n'
        << "output = " << output.string() << '\n'
        << "mock = " << b(mock) << '\n';
    return out.str();
}

}  // namespace presuppose::app
