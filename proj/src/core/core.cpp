#include "presuppose/core.hpp"

#include <algorithm>
#include <cctype>

namespace presuppose {

Label label_from_int(int code)
{
    switch (code) {
    case 0:
        return Label::kHasFalseAssumption;
    case 1:
        return Label::kAllValid;
    default:
        throw ContractError("label code must be 0 or 1, got " + std::to_string(code));
    }
}

std::string_view to_string(Corpus corpus)
{
    switch (corpus) {
    case Corpus::kQa2:
        return "QA2";
    case Corpus::kCrepe:
        return "CREPE";
    case Corpus::kFalseQa:
        return "FALSEQA";
    case Corpus::kCustom:
        return "CUSTOM";
    }
    return "CUSTOM";
}

Corpus corpus_from_string(std::string_view name)
{
    std::string upper;
    for (char c : name) {
        if (c == '(' || c == ')' || c == '-' || c == '_')
            continue;
        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    // "(QA)^2" and "(QA)²" are the usual spellings of the first corpus.
    if (upper == "QA2" || upper == "QA^2" || upper == "QA\xC2\xB2")
        return Corpus::kQa2;
    if (upper == "CREPE")
        return Corpus::kCrepe;
    if (upper == "FALSEQA")
        return Corpus::kFalseQa;
    if (upper == "CUSTOM")
        return Corpus::kCustom;
    throw ContractError("unknown corpus '" + std::string(name) + "'");
}

std::string_view to_string(InputKind kind)
{
    return kind == InputKind::kQuestion ? "question" : "statement";
}

InputKind input_kind_from_string(std::string_view name)
{
    if (name == "question")
        return InputKind::kQuestion;
    if (name == "statement")
        return InputKind::kStatement;
    throw ContractError("unknown input kind '" + std::string(name) + "'");
}

UsageRecord& UsageRecord::operator+=(const UsageRecord& other)
{
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    llm_calls += other.llm_calls;
    estimated = estimated || other.estimated;
    return *this;
}

std::string_view trim(std::string_view text)
{
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!text.empty() && is_space(text.front()))
        text.remove_prefix(1);
    while (!text.empty() && is_space(text.back()))
        text.remove_suffix(1);
    return text;
}

QuestionRecord::QuestionRecord(std::string id, std::string text, Corpus corpus)
    : id_(std::move(id)), text_(std::move(text)), corpus_(corpus)
{
    if (id_.empty())
        throw ContractError("question id must not be empty");
    if (trim(text_).empty())
        throw ContractError("question '" + id_ + "' has empty text");
}

Label adjudicate(std::span<const Label> labels)
{
    if (labels.empty())
        throw ContractError("adjudicate: empty label list (question was never decomposed)");
    const bool all_valid =
        std::all_of(labels.begin(), labels.end(), [](Label l) { return l == Label::kAllValid; });
    return all_valid ? Label::kAllValid : Label::kHasFalseAssumption;
}

namespace {

Label adjudicate_validated(std::span<const ValidatedAssumption> validated)
{
    std::vector<Label> labels;
    labels.reserve(validated.size());
    for (const auto& v : validated)
        labels.push_back(v.label);
    return adjudicate(labels);
}

}  // namespace

std::string verbalize(std::span<const ValidatedAssumption> validated,
                      const QuestionRecord& question, Label overall)
{
    if (!validated.empty() && adjudicate_validated(validated) != overall)
        throw ContractError("verbalize: overall label disagrees with the assumption labels");
    for (const auto& v : validated) {
        if (v.assumption.question_id != question.id())
            throw ContractError("verbalize: assumption belongs to question '" +
                                v.assumption.question_id + "', not '" + question.id() + "'");
    }

    std::vector<const ValidatedAssumption*> ordered;
    ordered.reserve(validated.size());
    for (const auto& v : validated)
        ordered.push_back(&v);
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        return a->assumption.index < b->assumption.index;
    });

    std::string out = overall == Label::kHasFalseAssumption
                          ? "The question contains false assumptions."
                          : "The question's assumptions hold.";
    for (const auto* v : ordered) {
        if (v->label == Label::kHasFalseAssumption)
            out += "\nFalse: " + v->assumption.text;
    }
    for (const auto* v : ordered) {
        if (v->label == Label::kAllValid)
            out += "\nHolds: " + v->assumption.text;
    }
    return out;
}

std::string verbalize(std::span<const ValidatedAssumption> validated,
                      const QuestionRecord& question)
{
    return verbalize(validated, question, adjudicate_validated(validated));
}

Verdict::Verdict(std::string question_id, Label label,
                 std::vector<ValidatedAssumption> per_assumption, std::string answer_text,
                 std::string strategy_id, UsageRecord usage, std::vector<std::string> flags)
    : question_id_(std::move(question_id)),
      label_(label),
      per_assumption_(std::move(per_assumption)),
      answer_text_(std::move(answer_text)),
      strategy_id_(std::move(strategy_id)),
      usage_(usage),
      flags_(std::move(flags))
{
    if (!per_assumption_.empty()) {
        if (adjudicate_validated(per_assumption_) != label_)
            throw ContractError("verdict for '" + question_id_ +
                                "': label disagrees with the conjunction of its assumptions");
        for (const auto& v : per_assumption_) {
            if (v.assumption.question_id != question_id_)
                throw ContractError("verdict for '" + question_id_ +
                                    "' holds an assumption of '" + v.assumption.question_id + "'");
        }
    }
}

bool Verdict::has_flag(std::string_view flag) const
{
    return std::find(flags_.begin(), flags_.end(), flag) != flags_.end();
}

}  // namespace presuppose
