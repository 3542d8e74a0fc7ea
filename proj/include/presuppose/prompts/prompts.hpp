#pragma once

#include "presuppose/core.hpp"
#include "presuppose/llm/llm.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace presuppose::prompts {

enum class TemplateId {
    kTransform,
    kIdentifyPlain,
    kIdentifyWithEvidence,
    kGenerateKnowledge,
    kAtomicGenerate,
    kInterpret,
};

// Template file names (without the .txt extension). The plain identification
// prompt has separate bodies for questions and statements because its shots
// differ; every other template has a single body.
namespace names {
inline constexpr std::string_view kTransform = "transform";
inline constexpr std::string_view kIdentifyPlainQuestion = "identify_plain.question";
inline constexpr std::string_view kIdentifyPlainStatement = "identify_plain.statement";
inline constexpr std::string_view kIdentifyWithEvidence = "identify_with_evidence";
inline constexpr std::string_view kGenerateKnowledge = "generate_knowledge";
inline constexpr std::string_view kAtomicGenerate = "atomic_generate";
inline constexpr std::string_view kInterpret = "interpret";
// Editable default for zero-shot reasoning-model profiles.
inline constexpr std::string_view kIdentifyZeroShot = "identify_zero_shot";
}  // namespace names

std::string_view template_name(TemplateId id, InputKind kind = InputKind::kQuestion);

class TemplateError : public Error {
public:
    using Error::Error;
};

struct PromptTemplate {
    TemplateId id;
    std::string body;
};

// Named template bodies. builtin() holds the frozen few-shot texts.
class TemplateSet {
public:
    static const TemplateSet& builtin();

    // Built-in bodies, overridden by every <name>.txt found in `dir`. One
    // trailing newline is stripped from each file.
    static TemplateSet from_directory(const std::filesystem::path& dir);

    const std::string& body(std::string_view name) const;
    PromptTemplate get(TemplateId id, InputKind kind = InputKind::kQuestion) const;
    void set(std::string name, std::string body);
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::string, std::less<>> bodies_;
};

// Substitutes {slot} occurrences in a single pass; substituted values are
// inserted literally and never rescanned. A brace sequence that is not a
// lower-case identifier is literal text. Throws TemplateError for a slot with
// no binding.
std::string render_template(std::string_view body,
                            const std::map<std::string, std::string, std::less<>>& slots);

// Evidence sentences joined with "; " in rank order.
std::string join_evidence(const EvidenceSet& evidence);

llm::CompletionRequest render_transform(const QuestionRecord& question,
                                        const TemplateSet& templates = TemplateSet::builtin());

// Without evidence: plain few-shot identification. With evidence: the
// evidence-aware template. An explicitly passed empty set is a ContractError;
// callers fall back to the plain template themselves.
llm::CompletionRequest render_identify(std::string_view input_text, InputKind kind,
                                       const EvidenceSet* evidence = nullptr,
                                       const TemplateSet& templates = TemplateSet::builtin());

// Zero-shot identification from the editable identify_zero_shot body.
llm::CompletionRequest render_identify_zero_shot(std::string_view input_text, InputKind kind,
                                                 const TemplateSet& templates = TemplateSet::builtin());

llm::CompletionRequest render_generate_knowledge(std::string_view input_text,
                                                 const TemplateSet& templates = TemplateSet::builtin());

llm::CompletionRequest render_atomic(const QuestionRecord& question,
                                     const TemplateSet& templates = TemplateSet::builtin());

llm::CompletionRequest render_interpret(const QuestionRecord& question, const EvidenceSet& evidence,
                                        const TemplateSet& templates = TemplateSet::builtin());

class UnparseableVerdict : public Error {
public:
    explicit UnparseableVerdict(std::string raw)
        : Error("cannot read a yes/no verdict from: '" + raw + "'"), raw_(std::move(raw))
    {
    }
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

class EmptyDecomposition : public Error {
public:
    explicit EmptyDecomposition(std::string raw)
        : Error("no enumerated assumptions found in model output"), raw_(std::move(raw))
    {
    }
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

// Leading token, case-insensitive, surrounding whitespace and punctuation
// ignored: "yes" -> kHasFalseAssumption, "no" -> kAllValid. Anything else
// raises UnparseableVerdict.
Label parse_yes_no(std::string_view text);

// Items introduced at line start by "(n)", "n." or "n)". Markers are
// stripped, empty items dropped and the result re-indexed 1..n. Lines without
// a marker are ignored. Zero items raises EmptyDecomposition.
std::vector<AtomicAssumption> parse_enumeration(std::string_view text,
                                                const std::string& question_id);

}  // namespace presuppose::prompts
