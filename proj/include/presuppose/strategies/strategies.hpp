#pragma once

#include "presuppose/core.hpp"
#include "presuppose/llm/llm.hpp"
#include "presuppose/net/retry.hpp"
#include "presuppose/prompts/prompts.hpp"
#include "presuppose/retrieval/retrieval.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace presuppose::strategies {

enum class Family { kFactVerify, kDirect, kGeneratedEvidence, kAtomic };
enum class EvidenceMode { kNone, kGold, kRetrievedByQuestion, kRetrievedByStatement };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);
std::string_view to_string(EvidenceMode mode);
EvidenceMode evidence_mode_from_string(std::string_view name);

struct StrategyConfig {
    Family family = Family::kDirect;
    InputKind input_kind = InputKind::kQuestion;  // ATOMIC always reads the question
    EvidenceMode evidence_mode = EvidenceMode::kNone;
    int k = kMaxEvidenceK;
    double fv_threshold = 0.5;
    // Zero-shot identification template instead of the few-shot blocks.
    bool zero_shot = false;
    // ATOMIC with retrieved evidence: reuse the question's evidence for every
    // assumption instead of retrieving with the assumption text.
    bool assumption_evidence_from_question = false;

    // Throws ContractError on k outside 1..10, a threshold outside [0,1],
    // GENERATED_EVIDENCE with an evidence mode, FACT_VERIFY without one, or
    // zero-shot combined with evidence.
    void validate() const;

    // Stable label written to prediction files, e.g.
    // "atomic+retrieved_by_question@k10".
    std::string id() const;
};

// One dataset item as the pipeline sees it.
struct QuestionInput {
    QuestionRecord question;
    std::optional<std::vector<std::string>> gold_evidence;
    // Pre-retrieved passages; when present they replace search and fetch.
    std::vector<std::string> passages;
};

struct InterpretationRecord {
    std::string question_id;
    std::string text;
    EvidenceSet evidence_used;
};

class TransformFailed : public Error {
public:
    explicit TransformFailed(const std::string& question_id)
        : Error("transformation of '" + question_id + "' produced no statement")
    {
    }
};

class InterpretFailed : public Error {
public:
    explicit InterpretFailed(const std::string& question_id)
        : Error("interpretation of '" + question_id + "' is empty")
    {
    }
};

// Support probability of a claim given a document.
class VerifierProvider {
public:
    virtual ~VerifierProvider() = default;
    virtual double support_probability(const std::string& document, const std::string& claim) = 0;
};

// Claim text -> probability, read from {"<claim>": p, ...}. Unknown claims
// raise a non-retriable ProviderError.
class ScriptedVerifier : public VerifierProvider {
public:
    explicit ScriptedVerifier(std::map<std::string, double> probabilities)
        : probabilities_(std::move(probabilities))
    {
    }
    static ScriptedVerifier from_file(const std::filesystem::path& path);
    double support_probability(const std::string& document, const std::string& claim) override;

private:
    std::map<std::string, double> probabilities_;
};

struct HttpVerifierConfig {
    std::string url;
    std::string api_key;
    std::chrono::seconds timeout{60};
    net::RetryPolicy retry;
};

// POST {"document": s, "claim": s} and read {"probability": p}.
class HttpVerifierProvider : public VerifierProvider {
public:
    explicit HttpVerifierProvider(HttpVerifierConfig config, net::Sleeper sleeper = net::real_sleep);
    double support_probability(const std::string& document, const std::string& claim) override;

private:
    HttpVerifierConfig config_;
    net::Sleeper sleeper_;
};

// support >= threshold -> ALL_VALID, else HAS_FALSE_ASSUMPTION.
Label label_from_support(double support, double threshold);

// Extracts the statement from a transformation completion: the first
// non-empty line after "Statement:" or, without the marker, the whole
// trimmed completion. Empty result -> TransformFailed.
std::string parse_statement(std::string_view completion, const std::string& question_id);

// Resolved input text (question or statement) and its evidence, if the
// strategy uses any.
struct PreparedInput {
    std::string input_text;
    std::optional<EvidenceSet> evidence;
};

using WarningSink = std::function<void(const std::string&)>;

// Every identification and answering strategy over one set of providers.
// Holds no per-question state, so one instance may serve concurrent calls
// when its providers can.
class Pipeline {
public:
    explicit Pipeline(llm::CompletionProvider& llm, std::string model_id = {},
                      const prompts::TemplateSet& templates = prompts::TemplateSet::builtin());

    void set_retriever(retrieval::Retriever* retriever) { retriever_ = retriever; }
    void set_verifier(VerifierProvider* verifier) { verifier_ = verifier; }
    // Scores gold evidence; defaults to the retriever's scorer, else lexical.
    void set_scorer(retrieval::SentenceScorer* scorer) { scorer_ = scorer; }
    void set_warning_sink(WarningSink sink) { warn_ = std::move(sink); }

    // Dispatches on cfg.family.
    Verdict run(const QuestionInput& input, const StrategyConfig& cfg);

    // Input resolution and evidence acquisition shared by the question-level
    // strategies. Flags no_evidence and transform_failed as needed.
    PreparedInput prepare(const QuestionInput& input, const StrategyConfig& cfg, UsageRecord& usage,
                          std::vector<std::string>& flags);

    StatementRecord transform_question(const QuestionRecord& question, UsageRecord& usage);
    Verdict identify(const QuestionInput& input, const StrategyConfig& cfg);
    Label fact_verify(const EvidenceSet& evidence, const std::string& claim, double threshold);
    std::vector<AtomicAssumption> generate_assumptions(const QuestionRecord& question,
                                                       UsageRecord& usage);
    ValidatedAssumption validate_assumption(const AtomicAssumption& assumption,
                                            const QuestionInput& input, const StrategyConfig& cfg,
                                            UsageRecord& usage, std::vector<std::string>& flags);
    Verdict run_atomic(const QuestionInput& input, const StrategyConfig& cfg);
    InterpretationRecord interpret(const QuestionRecord& question, const EvidenceSet& evidence,
                                   UsageRecord& usage);

private:
    llm::CompletionResponse complete(llm::CompletionRequest request, UsageRecord& usage);
    retrieval::SentenceScorer& scorer();
    retrieval::Retriever& retriever(const std::string& question_id);

    // Evidence for `text` (the resolved input or an assumption) per mode.
    // `retrieval_query` seeds search in RETRIEVED modes.
    std::optional<EvidenceSet> acquire_evidence(const QuestionInput& input, const StrategyConfig& cfg,
                                                const std::string& text, InputKind kind,
                                                const std::string& retrieval_query,
                                                InputKind query_kind);

    ValidatedAssumption judge_assumption(const AtomicAssumption& assumption,
                                         std::optional<EvidenceSet> evidence,
                                         const StrategyConfig& cfg, UsageRecord& usage,
                                         std::vector<std::string>& flags);
    Label ask_label(const llm::CompletionRequest& request, const std::string& what, UsageRecord& usage,
                    std::vector<std::string>& flags);
    void add_flag(std::vector<std::string>& flags, std::string_view flag);

    llm::CompletionProvider& llm_;
    std::string model_id_;
    const prompts::TemplateSet& templates_;
    retrieval::Retriever* retriever_ = nullptr;
    VerifierProvider* verifier_ = nullptr;
    retrieval::SentenceScorer* scorer_ = nullptr;
    retrieval::LexicalScorer lexical_;
    WarningSink warn_;
};

}  // namespace presuppose::strategies
