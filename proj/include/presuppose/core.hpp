#pragma once

#include "presuppose/errors.hpp"
#include "presuppose/evidence.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace presuppose {

// Question-level (and assumption-level) label. The integer codes are part of
// every serialized format: 0 means the input carries at least one false
// assumption, 1 means every assumption holds.
enum class Label : int {
    kHasFalseAssumption = 0,
    kAllValid = 1,
};

constexpr int to_int(Label label) { return static_cast<int>(label); }
Label label_from_int(int code);  // throws ContractError on anything but 0/1

enum class Corpus { kQa2, kCrepe, kFalseQa, kCustom };

// What a prompt or retrieval query is built from.
enum class InputKind { kQuestion, kStatement };

std::string_view to_string(InputKind kind);
InputKind input_kind_from_string(std::string_view name);

std::string_view to_string(Corpus corpus);
Corpus corpus_from_string(std::string_view name);  // case-insensitive

// Token and call accounting for one or more completions.
struct UsageRecord {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t llm_calls = 0;
    // Set when any contributing count was estimated rather than reported by
    // the provider.
    bool estimated = false;

    UsageRecord& operator+=(const UsageRecord& other);
    friend UsageRecord operator+(UsageRecord lhs, const UsageRecord& rhs) { return lhs += rhs; }
    friend bool operator==(const UsageRecord&, const UsageRecord&) = default;
};

class QuestionRecord {
public:
    // Throws ContractError when id is empty or text is blank.
    QuestionRecord(std::string id, std::string text, Corpus corpus = Corpus::kCustom);

    const std::string& id() const { return id_; }
    const std::string& text() const { return text_; }
    Corpus corpus() const { return corpus_; }

private:
    std::string id_;
    std::string text_;
    Corpus corpus_;
};

struct StatementRecord {
    std::string question_id;
    std::string text;
};

struct AtomicAssumption {
    std::string question_id;
    int index = 0;  // 1-based, contiguous within a question
    std::string text;

    friend bool operator==(const AtomicAssumption&, const AtomicAssumption&) = default;
};

struct ValidatedAssumption {
    AtomicAssumption assumption;
    Label label = Label::kAllValid;
    std::shared_ptr<const EvidenceSet> evidence_used;
};

// L = AND of the per-assumption labels. Throws ContractError on an empty
// list: a question that was never decomposed must not reach the adjudicator.
Label adjudicate(std::span<const Label> labels);

// Deterministic answer surface:
//   "The question contains false assumptions." | "The question's assumptions hold."
//   "False: <text>"  for each label-0 assumption, in index order
//   "Holds: <text>"  for each label-1 assumption, in index order
// Lines are joined with '\n' without a trailing newline. `overall` is
// required because an empty list carries no label of its own; when the list
// is non-empty it must agree with adjudicate().
std::string verbalize(std::span<const ValidatedAssumption> validated,
                      const QuestionRecord& question, Label overall);

// Overload for a non-empty list: the headline comes from adjudicate().
std::string verbalize(std::span<const ValidatedAssumption> validated,
                      const QuestionRecord& question);

// Fallback markers recorded on a verdict. Reports count them.
namespace flags {
inline constexpr std::string_view kUnparseableVerdict = "unparseable_verdict";
inline constexpr std::string_view kTransformFailed = "transform_failed";
inline constexpr std::string_view kEmptyDecomposition = "empty_decomposition";
inline constexpr std::string_view kNoEvidence = "no_evidence";
}  // namespace flags

class Verdict {
public:
    // Throws ContractError when per_assumption is non-empty and its
    // conjunction disagrees with `label`, or when an assumption belongs to a
    // different question.
    Verdict(std::string question_id, Label label, std::vector<ValidatedAssumption> per_assumption,
            std::string answer_text, std::string strategy_id, UsageRecord usage,
            std::vector<std::string> flags = {});

    const std::string& question_id() const { return question_id_; }
    Label label() const { return label_; }
    const std::vector<ValidatedAssumption>& per_assumption() const { return per_assumption_; }
    const std::string& answer_text() const { return answer_text_; }
    const std::string& strategy_id() const { return strategy_id_; }
    const UsageRecord& usage() const { return usage_; }
    const std::vector<std::string>& flags() const { return flags_; }
    bool has_flag(std::string_view flag) const;

private:
    std::string question_id_;
    Label label_;
    std::vector<ValidatedAssumption> per_assumption_;
    std::string answer_text_;
    std::string strategy_id_;
    UsageRecord usage_;
    std::vector<std::string> flags_;
};

// Whitespace trimming shared by parsers across modules.
std::string_view trim(std::string_view text);

}  // namespace presuppose
