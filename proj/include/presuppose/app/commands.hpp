#pragma once

#include "presuppose/app/cache.hpp"
#include "presuppose/app/config.hpp"
#include "presuppose/evaldata/evaldata.hpp"
#include "presuppose/strategies/strategies.hpp"

#include <iosfwd>
#include <memory>
#include <optional>

namespace presuppose::app {

// Providers, cache and pipeline built from one RunConfig.
class Session {
public:
    explicit Session(const RunConfig& cfg);
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    strategies::Pipeline& pipeline() { return *pipeline_; }
    const RunConfig& config() const { return cfg_; }

    // Completions that reached the underlying provider (cache misses).
    std::int64_t provider_calls() const;
    std::int64_t cache_hits() const;

    // Writes the recorded script when llm.record is set. Called by the
    // destructor too; errors there are swallowed.
    void save_recording();

private:
    RunConfig cfg_;
    std::optional<ResponseCache> cache_;
    prompts::TemplateSet templates_;

    std::unique_ptr<llm::CompletionProvider> llm_base_;
    std::unique_ptr<llm::MeteredProvider> llm_meter_;
    std::unique_ptr<CachingCompletionProvider> llm_cache_;
    std::unique_ptr<llm::RecordingProvider> llm_record_;

    std::unique_ptr<retrieval::FixtureWeb> fixture_;
    std::unique_ptr<retrieval::SearchProvider> http_search_;
    std::unique_ptr<retrieval::PageFetcher> http_fetcher_;
    std::unique_ptr<CachingSearchProvider> search_cache_;
    std::unique_ptr<CachingPageFetcher> fetch_cache_;

    std::unique_ptr<retrieval::EmbeddingProvider> embed_base_;
    std::unique_ptr<CachingEmbeddingProvider> embed_cache_;
    std::unique_ptr<retrieval::SentenceScorer> scorer_;
    std::unique_ptr<retrieval::Retriever> retriever_;

    std::unique_ptr<strategies::VerifierProvider> verifier_base_;
    std::unique_ptr<CachingVerifier> verifier_cache_;

    std::unique_ptr<strategies::Pipeline> pipeline_;
    bool recording_saved_ = false;
};

strategies::QuestionInput to_question_input(const evaldata::DatasetInstance& instance);

// Dataset, pipeline commands. Each writes JSONL to cfg.output in dataset
// order and returns 0 when every instance produced a line, 1 otherwise
// (failed ids are listed on `err`). With `resume`, ids already in the output
// are skipped and new lines appended.
int cmd_transform(const RunConfig& cfg, std::ostream& err, bool resume = false);
int cmd_retrieve(const RunConfig& cfg, std::ostream& err, bool resume = false);
// Also writes the effective configuration to "<output>.config" and echoes it
// to `err`.
int cmd_run(const RunConfig& cfg, std::ostream& err, bool resume = false);

struct ReportOptions {
    Corpus corpus = Corpus::kCustom;  // CUSTOM: taken from the dataset when uniform
    std::optional<std::filesystem::path> json_out;
    double alpha = 0.05;
};

// Reports: human text to `out`, JSON to json_out when given. Id coverage
// mismatches raise CoverageError.
int cmd_eval(const std::filesystem::path& predictions, const std::filesystem::path& dataset,
             const ReportOptions& options, std::ostream& out);
int cmd_compare(const std::filesystem::path& predictions_a, const std::filesystem::path& predictions_b,
                const std::filesystem::path& dataset, const ReportOptions& options, std::ostream& out);
int cmd_cost(const std::filesystem::path& predictions, const ReportOptions& options, std::ostream& out);
int cmd_tag_errors(const std::filesystem::path& predictions, const std::filesystem::path& dataset,
                   const std::filesystem::path& tags, const ReportOptions& options, std::ostream& out);

}  // namespace presuppose::app
