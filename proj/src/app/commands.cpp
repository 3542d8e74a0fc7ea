#include "presuppose/app/commands.hpp"

#include "presuppose/app/runner.hpp"

#include <fstream>
#include <iostream>
#include <mutex>

namespace presuppose::app {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

Session::Session(const RunConfig& cfg) : cfg_(cfg)
{
    if (!cfg_.cache_dir.empty())
        cache_.emplace(cfg_.cache_dir);
    templates_ = cfg_.llm.templates.empty() ? prompts::TemplateSet::builtin()
                                            : prompts::TemplateSet::from_directory(cfg_.llm.templates);

    // LLM: base -> meter -> cache -> recorder
    if (cfg_.llm.provider == "http") {
        llm::HttpChatConfig http;
        http.base_url = cfg_.llm.base_url;
        http.api_key = cfg_.llm.api_key;
        http.timeout = std::chrono::seconds(cfg_.llm.timeout_s);
        llm_base_ = std::make_unique<llm::HttpChatProvider>(http);
    } else {
        if (cfg_.llm.script.empty())
            throw ConfigError("llm.provider = scripted needs llm.script");
        llm_base_ = std::make_unique<llm::ScriptedProvider>(llm::ScriptedProvider::from_file(cfg_.llm.script));
    }
    llm_meter_ = std::make_unique<llm::MeteredProvider>(*llm_base_);
    llm::CompletionProvider* llm = llm_meter_.get();
    if (cache_) {
        llm_cache_ = std::make_unique<CachingCompletionProvider>(*llm, *cache_);
        llm = llm_cache_.get();
    }
    if (!cfg_.llm.record.empty()) {
        llm_record_ = std::make_unique<llm::RecordingProvider>(*llm);
        llm = llm_record_.get();
    }

    // Scorer
    if (cfg_.embedder.provider == "http") {
        retrieval::HttpEmbeddingConfig http;
        http.url = cfg_.embedder.url;
        http.api_key = cfg_.embedder.api_key;
        http.batch_size = static_cast<std::size_t>(cfg_.embedder.batch_size);
        embed_base_ = std::make_unique<retrieval::HttpEmbeddingProvider>(http);
        retrieval::EmbeddingProvider* embed = embed_base_.get();
        if (cache_) {
            embed_cache_ = std::make_unique<CachingEmbeddingProvider>(*embed, *cache_);
            embed = embed_cache_.get();
        }
        scorer_ = std::make_unique<retrieval::EmbeddingScorer>(*embed);
    } else {
        scorer_ = std::make_unique<retrieval::LexicalScorer>();
    }

    // Search and fetch
    retrieval::SearchProvider* search = nullptr;
    retrieval::PageFetcher* fetcher = nullptr;
    if (cfg_.search.provider == "fixture") {
        fixture_ = std::make_unique<retrieval::FixtureWeb>(retrieval::FixtureWeb::from_file(cfg_.search.fixture));
        search = fixture_.get();
        fetcher = fixture_.get();
    } else if (cfg_.search.provider == "http") {
        retrieval::HttpSearchConfig http;
        if (!cfg_.search.url_template.empty())
            http.url_template = cfg_.search.url_template;
        http.api_key = cfg_.search.api_key;
        http.engine_id = cfg_.search.engine_id;
        http.timeout = std::chrono::seconds(cfg_.search.timeout_s);
        http_search_ = std::make_unique<retrieval::HttpSearchProvider>(http);
        http_fetcher_ = std::make_unique<retrieval::HttpPageFetcher>(
            cfg_.search.per_host_limit, std::chrono::seconds(cfg_.search.timeout_s));
        search = http_search_.get();
        fetcher = http_fetcher_.get();
        if (cache_) {
            search_cache_ = std::make_unique<CachingSearchProvider>(*search, *cache_);
            fetch_cache_ = std::make_unique<CachingPageFetcher>(*fetcher, *cache_);
            search = search_cache_.get();
            fetcher = fetch_cache_.get();
        }
    }
    if (search != nullptr)
        retriever_ = std::make_unique<retrieval::Retriever>(*search, *fetcher, *scorer_);

    // Verifier
    strategies::VerifierProvider* verifier = nullptr;
    if (cfg_.verifier.provider == "scripted") {
        verifier_base_ = std::make_unique<strategies::ScriptedVerifier>(
            strategies::ScriptedVerifier::from_file(cfg_.verifier.script));
        verifier = verifier_base_.get();
    } else if (cfg_.verifier.provider == "http") {
        strategies::HttpVerifierConfig http;
        http.url = cfg_.verifier.url;
        http.api_key = cfg_.verifier.api_key;
        verifier_base_ = std::make_unique<strategies::HttpVerifierProvider>(http);
        verifier = verifier_base_.get();
        if (cache_) {
            verifier_cache_ = std::make_unique<CachingVerifier>(*verifier, *cache_);
            verifier = verifier_cache_.get();
        }
    }

    pipeline_ = std::make_unique<strategies::Pipeline>(*llm, cfg_.llm.model, templates_);
    pipeline_->set_scorer(scorer_.get());
    pipeline_->set_retriever(retriever_.get());
    pipeline_->set_verifier(verifier);
}

Session::~Session()
{
    try {
        save_recording();
    } catch (...) {
    }
}

std::int64_t Session::provider_calls() const { return llm_meter_->totals().llm_calls; }

std::int64_t Session::cache_hits() const { return llm_cache_ ? llm_cache_->hits() : 0; }

void Session::save_recording()
{
    if (!llm_record_ || recording_saved_)
        return;
    recording_saved_ = true;
    std::ofstream out(cfg_.llm.record, std::ios::binary);
    if (!out)
        throw Error("cannot write " + cfg_.llm.record.string());
    out << llm::script_to_json(llm_record_->script()).dump(2) << '\n';
}

strategies::QuestionInput to_question_input(const evaldata::DatasetInstance& instance)
{
    return strategies::QuestionInput{QuestionRecord(instance.id, instance.question, instance.corpus),
                                     instance.gold_evidence, instance.passages};
}

namespace {

// Shared driver of the per-instance commands.
int run_instances(const RunConfig& cfg, std::ostream& err, bool resume, Session& session,
                  const std::function<std::string(const evaldata::DatasetInstance&)>& compute)
{
    if (cfg.output.empty())
        throw ConfigError("run.output is not set");
    auto instances = evaldata::load_dataset(cfg.dataset, cfg.corpus);

    std::set<std::string> done;
    if (resume)
        done = completed_ids(cfg.output);
    std::vector<evaldata::DatasetInstance> todo;
    for (auto& inst : instances)
        if (!done.count(inst.id))
            todo.push_back(std::move(inst));

    if (!cfg.output.parent_path().empty())
        fs::create_directories(cfg.output.parent_path());
    std::ofstream out(cfg.output, resume ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + cfg.output.string());

    std::vector<std::string> ids;
    ids.reserve(todo.size());
    for (const auto& inst : todo)
        ids.push_back(inst.id);

    const auto failures = run_ordered(
        ids, cfg.concurrency, [&](std::size_t i) { return compute(todo[i]); },
        [&](const std::string& line) {
            out << line << '\n';
            out.flush();
            if (!out)
                throw Error("write to " + cfg.output.string() + " failed");
        });
    session.save_recording();

    err << "instances: " << ids.size() << " run, " << done.size() << " resumed, " << failures.size()
        << " failed\n";
    err << "provider_calls: " << session.provider_calls() << ", cache_hits: " << session.cache_hits()
        << '\n';
    if (failures.empty())
        return 0;
    err << "failed ids:\n";
    for (const auto& f : failures)
        err << "  " << f.id << ": " << f.message << '\n';
    return 1;
}

void warn_to(std::ostream& err, Session& session)
{
    static std::mutex mutex;
    session.pipeline().set_warning_sink([&err](const std::string& message) {
        std::lock_guard lock(mutex);
        err << "warning: " << message << '\n';
    });
}

}  // namespace

int cmd_transform(const RunConfig& cfg, std::ostream& err, bool resume)
{
    cfg.validate(true);
    Session session(cfg);
    warn_to(err, session);
    return run_instances(cfg, err, resume, session, [&](const evaldata::DatasetInstance& inst) {
        UsageRecord usage;
        const auto statement = session.pipeline().transform_question(
            QuestionRecord(inst.id, inst.question, inst.corpus), usage);
        ordered_json j;
        j["id"] = inst.id;
        j["statement"] = statement.text;
        return j.dump();
    });
}

int cmd_retrieve(const RunConfig& cfg, std::ostream& err, bool resume)
{
    cfg.validate(true);
    auto strategy = cfg.strategy;
    if (strategy.family != strategies::Family::kGeneratedEvidence) {
        strategy.family = strategies::Family::kDirect;
        strategy.zero_shot = false;
        if (strategy.evidence_mode == strategies::EvidenceMode::kNone)
            strategy.evidence_mode = strategies::EvidenceMode::kRetrievedByQuestion;
    }
    Session session(cfg);
    warn_to(err, session);
    return run_instances(cfg, err, resume, session, [&](const evaldata::DatasetInstance& inst) {
        UsageRecord usage;
        std::vector<std::string> flags;
        const auto prepared = session.pipeline().prepare(to_question_input(inst), strategy, usage, flags);
        ordered_json j;
        j["id"] = inst.id;
        j["origin"] = to_string(prepared.evidence->origin());
        j["sentences"] = ordered_json::array();
        for (const auto& s : prepared.evidence->sentences())
            j["sentences"].push_back(
                ordered_json{{"text", s.text}, {"score", s.score}, {"source_url", s.source_url}});
        return j.dump();
    });
}

int cmd_run(const RunConfig& cfg, std::ostream& err, bool resume)
{
    cfg.validate(true);
    const auto ini = cfg.to_ini();
    err << "# effective configuration\n" << ini << '\n';
    Session session(cfg);
    warn_to(err, session);
    const bool decomposed = cfg.strategy.family == strategies::Family::kAtomic;
    const int code = run_instances(cfg, err, resume, session, [&](const evaldata::DatasetInstance& inst) {
        const auto verdict = session.pipeline().run(to_question_input(inst), cfg.strategy);
        return evaldata::to_jsonl_line(evaldata::prediction_from_verdict(verdict, decomposed));
    });
    auto sidecar = cfg.output;
    sidecar += ".config";
    std::ofstream side(sidecar, std::ios::binary | std::ios::trunc);
    side << ini;
    return code;
}

namespace {

Corpus report_corpus(const ReportOptions& options, std::span<const evaldata::DatasetInstance> golds)
{
    if (options.corpus != Corpus::kCustom || golds.empty())
        return options.corpus;
    const auto first = golds.front().corpus;
    for (const auto& g : golds)
        if (g.corpus != first)
            return Corpus::kCustom;
    return first;
}

void write_json(const ReportOptions& options, const ordered_json& j)
{
    if (!options.json_out)
        return;
    std::ofstream out(*options.json_out, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + options.json_out->string());
    out << j.dump(2) << '\n';
}

}  // namespace

int cmd_eval(const fs::path& predictions, const fs::path& dataset, const ReportOptions& options,
             std::ostream& out)
{
    const auto golds = evaldata::load_dataset(dataset, options.corpus);
    const auto records = evaldata::read_predictions(predictions);
    const auto corpus = report_corpus(options, golds);
    const auto report = evaldata::evaluate(evaldata::labels_of(records), golds, corpus);
    out << evaldata::format_report(report, corpus);
    write_json(options, report.to_json());
    return 0;
}

int cmd_compare(const fs::path& predictions_a, const fs::path& predictions_b, const fs::path& dataset,
                const ReportOptions& options, std::ostream& out)
{
    const auto golds = evaldata::load_dataset(dataset, options.corpus);
    const auto a = evaldata::labels_of(evaldata::read_predictions(predictions_a));
    const auto b = evaldata::labels_of(evaldata::read_predictions(predictions_b));
    const auto result = evaldata::mcnemar(a, b, golds);
    out << evaldata::format_mcnemar(result, options.alpha);
    auto j = result.to_json();
    j["significant"] = result.significant(options.alpha);
    write_json(options, j);
    return 0;
}

int cmd_cost(const fs::path& predictions, const ReportOptions& options, std::ostream& out)
{
    const auto records = evaldata::read_predictions(predictions);
    const auto report = evaldata::cost_report(records);
    out << evaldata::format_cost(report);
    write_json(options, report.to_json());
    return 0;
}

int cmd_tag_errors(const fs::path& predictions, const fs::path& dataset, const fs::path& tags,
                   const ReportOptions& options, std::ostream& out)
{
    const auto golds = evaldata::load_dataset(dataset, options.corpus);
    const auto records = evaldata::read_predictions(predictions);
    const auto table = evaldata::tag_errors(evaldata::labels_of(records), golds, evaldata::read_error_tags(tags));
    out << evaldata::format_error_table(table);
    write_json(options, table.to_json());
    return 0;
}

}  // namespace presuppose::app
