#pragma once

#include "presuppose/core.hpp"
#include "presuppose/evidence.hpp"
#include "presuppose/llm/llm.hpp"
#include "presuppose/net/retry.hpp"
#include "presuppose/prompts/prompts.hpp"

#include <json.hpp>

#include <condition_variable>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace presuppose::retrieval {

// Documents kept per query.
inline constexpr std::size_t kMaxDocuments = 3;

struct SearchHit {
    std::string url;
    std::string title;
};

struct Document {
    std::string url;
    std::string html;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    // Hits in engine rank order. Zero hits is an empty vector, not an error.
    virtual std::vector<SearchHit> search(const std::string& query) = 0;
};

class PageFetcher {
public:
    virtual ~PageFetcher() = default;
    virtual std::string fetch(const std::string& url) = 0;
};

// True for http(s) URLs on wikipedia.org or any of its subdomains.
bool is_wikipedia_url(const std::string& url);

// Searches, drops non-Wikipedia hits, keeps the first three and fetches them.
std::vector<Document> fetch_documents(const std::string& query, SearchProvider& search,
                                      PageFetcher& fetcher);

// Offline search engine and web backed by a JSON file:
//   {"search": {"<query>": ["<url>", ...]},
//    "pages":  {"<url>": "<html>" | {"file": "<path relative to the JSON>"}}}
class FixtureWeb : public SearchProvider, public PageFetcher {
public:
    FixtureWeb() = default;
    static FixtureWeb from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
    static FixtureWeb from_file(const std::filesystem::path& path);

    void add_results(std::string query, std::vector<std::string> urls);
    void add_page(std::string url, std::string html);

    std::vector<SearchHit> search(const std::string& query) override;
    std::string fetch(const std::string& url) override;

private:
    std::map<std::string, std::vector<std::string>> results_;
    std::map<std::string, std::string> pages_;
};

struct HttpSearchConfig {
    // Google Custom Search JSON API by default. {query}, {key} and {cx} are
    // substituted (URL-encoded) into the template.
    std::string url_template =
        "https://www.googleapis.com/customsearch/v1?key={key}&cx={cx}&q={query}&siteSearch=wikipedia.org";
    std::string api_key;  // PRESUPPOSE_SEARCH_KEY
    std::string engine_id;  // substituted for {cx}
    std::chrono::seconds timeout{30};
    net::RetryPolicy retry;
};

// Reads "items[].link/title" (Custom Search) or "results[].url/title".
class HttpSearchProvider : public SearchProvider {
public:
    explicit HttpSearchProvider(HttpSearchConfig config, net::Sleeper sleeper = net::real_sleep);
    std::vector<SearchHit> search(const std::string& query) override;

    static std::vector<SearchHit> parse_results(const nlohmann::json& payload);
    std::string request_url(const std::string& query) const;

private:
    HttpSearchConfig config_;
    net::Sleeper sleeper_;
};

// GETs pages while holding at most `per_host_limit` requests in flight per
// host.
class HttpPageFetcher : public PageFetcher {
public:
    explicit HttpPageFetcher(int per_host_limit = 2, std::chrono::seconds timeout = std::chrono::seconds(30),
                             net::RetryPolicy retry = {}, net::Sleeper sleeper = net::real_sleep);
    std::string fetch(const std::string& url) override;

private:
    int per_host_limit_;
    std::chrono::seconds timeout_;
    net::RetryPolicy retry_;
    net::Sleeper sleeper_;
    std::mutex mutex_;
    std::condition_variable released_;
    std::map<std::string, int> in_flight_;
};

// Plain paragraphs of an HTML page joined by blank lines. Markup, scripts,
// navigation, tables, infoboxes, reference lists, edit links and citation
// brackets such as "[3]" are removed. Input without any paragraph yields "".
std::string extract_main_content(std::string_view html);

// Rule-based segmentation: a break follows '.', '!' or '?' (plus any closing
// quotes or brackets) when whitespace and then an upper-case letter or digit
// come next, unless the word ending there is a known abbreviation or a single
// capital initial. Blank lines are hard breaks. Sentences are trimmed and
// empties dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Lower-cased word tokens. Word characters are letters and digits (ASCII and
// non-ASCII letters); apostrophes between letters and '.'/',' between digits
// stay inside a token.
std::vector<std::string> tokenize(std::string_view text);

struct CandidateSentence {
    std::string text;
    std::string source_url;
    int doc_rank = 1;
    int sent_pos = 0;
};

// Extract + split every document; doc_rank follows document order.
std::vector<CandidateSentence> candidates_from_documents(std::span<const Document> documents);

// Candidates from free-standing passages (gold evidence, pre-retrieved
// passages). Each passage counts as one document.
std::vector<CandidateSentence> candidates_from_passages(std::span<const std::string> passages,
                                                        std::string_view source_label);

class SentenceScorer {
public:
    virtual ~SentenceScorer() = default;
    // One score per candidate, higher is more relevant.
    virtual std::vector<double> score(std::string_view query, InputKind query_kind,
                                      std::span<const CandidateSentence> candidates) = 0;
};

// Cosine similarity of lower-case token count vectors. Needs no network.
class LexicalScorer : public SentenceScorer {
public:
    std::vector<double> score(std::string_view query, InputKind query_kind,
                              std::span<const CandidateSentence> candidates) override;
};

double lexical_cosine(std::string_view a, std::string_view b);

struct InstructedText {
    std::string instruction;
    std::string text;
};

// Instruction prefixes for instruction-tuned embedders.
std::string query_instruction(InputKind kind);
inline constexpr std::string_view kEvidenceInstruction = "Represent the evidence for retrieval: ";

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // One vector per input, same order.
    virtual std::vector<std::vector<double>> embed(std::span<const InstructedText> inputs) = 0;
};

struct HttpEmbeddingConfig {
    std::string url;  // POST endpoint
    std::string api_key;
    std::chrono::seconds timeout{60};
    std::size_t batch_size = 64;
    net::RetryPolicy retry;
};

// POST {"inputs": [{"instruction": s, "text": s}, ...]} and read
// {"embeddings": [[...], ...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config, net::Sleeper sleeper = net::real_sleep);
    std::vector<std::vector<double>> embed(std::span<const InstructedText> inputs) override;

private:
    HttpEmbeddingConfig config_;
    net::Sleeper sleeper_;
};

double cosine(std::span<const double> a, std::span<const double> b);

// Cosine similarity of instruction-prefixed query and candidate embeddings.
class EmbeddingScorer : public SentenceScorer {
public:
    explicit EmbeddingScorer(EmbeddingProvider& provider) : provider_(provider) {}
    std::vector<double> score(std::string_view query, InputKind query_kind,
                              std::span<const CandidateSentence> candidates) override;

private:
    EmbeddingProvider& provider_;
};

// Scores every candidate and keeps the best k (1..10) in ranks_before order.
// No candidates gives an empty set.
EvidenceSet rank_sentences(const std::string& question_id,
                           std::span<const CandidateSentence> candidates, std::string_view query,
                           InputKind query_kind, int k, SentenceScorer& scorer,
                           EvidenceOrigin origin);

// Plain strings: doc_rank 1 and sent_pos equal to the input position.
EvidenceSet rank_sentences(const std::string& question_id, std::span<const std::string> candidates,
                           std::string_view query, InputKind query_kind, int k,
                           SentenceScorer& scorer, EvidenceOrigin origin);

struct GeneratedEvidence {
    EvidenceSet evidence;
    UsageRecord usage;
};

// Model-written knowledge: the knowledge prompt is completed, split into
// sentences and kept (at most 10, in order) with uniform score 1.0.
GeneratedEvidence generate_evidence(const std::string& question_id, std::string_view input_text,
                                    llm::CompletionProvider& provider, const std::string& model_id,
                                    const prompts::TemplateSet& templates = prompts::TemplateSet::builtin());

// The two-stage pipeline: documents, then sentences.
class Retriever {
public:
    Retriever(SearchProvider& search, PageFetcher& fetcher, SentenceScorer& scorer)
        : search_(search), fetcher_(fetcher), scorer_(scorer)
    {
    }

    EvidenceSet retrieve(const std::string& question_id, const std::string& query,
                         InputKind query_kind, int k, EvidenceOrigin origin);

    // Skips the document stage for passages shipped with a dataset.
    EvidenceSet rank_passages(const std::string& question_id, std::span<const std::string> passages,
                              const std::string& query, InputKind query_kind, int k,
                              EvidenceOrigin origin);

    SentenceScorer& scorer() { return scorer_; }

private:
    SearchProvider& search_;
    PageFetcher& fetcher_;
    SentenceScorer& scorer_;
};

}  // namespace presuppose::retrieval
