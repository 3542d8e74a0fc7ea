#include "presuppose/evidence.hpp"

#include "presuppose/core.hpp"

#include <cmath>
#include <tuple>

namespace presuppose {

bool ranks_before(const EvidenceSentence& a, const EvidenceSentence& b)
{
    if (a.score != b.score)
        return a.score > b.score;
    return std::tie(a.doc_rank, a.sent_pos, a.text) < std::tie(b.doc_rank, b.sent_pos, b.text);
}

std::string_view to_string(EvidenceOrigin origin)
{
    switch (origin) {
    case EvidenceOrigin::kGold:
        return "gold";
    case EvidenceOrigin::kRetrievedByQuestion:
        return "retrieved_by_question";
    case EvidenceOrigin::kRetrievedByStatement:
        return "retrieved_by_statement";
    case EvidenceOrigin::kGenerated:
        return "generated";
    }
    return "gold";
}

EvidenceOrigin evidence_origin_from_string(std::string_view name)
{
    for (auto origin : {EvidenceOrigin::kGold, EvidenceOrigin::kRetrievedByQuestion,
                        EvidenceOrigin::kRetrievedByStatement, EvidenceOrigin::kGenerated}) {
        if (to_string(origin) == name)
            return origin;
    }
    throw ContractError("unknown evidence origin '" + std::string(name) + "'");
}

EvidenceSet::EvidenceSet(std::string question_id, std::vector<EvidenceSentence> sentences,
                         EvidenceOrigin origin, int k)
    : question_id_(std::move(question_id)), sentences_(std::move(sentences)), origin_(origin), k_(k)
{
    if (k_ < 1 || k_ > kMaxEvidenceK)
        throw ContractError("evidence cutoff k must be in 1..10, got " + std::to_string(k_));
    if (sentences_.size() > static_cast<std::size_t>(k_))
        throw ContractError("evidence set holds more sentences than its cutoff k");
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
        const auto& s = sentences_[i];
        if (trim(s.text).empty())
            throw ContractError("evidence sentence is empty");
        if (!std::isfinite(s.score))
            throw ContractError("evidence sentence has a non-finite score");
        if (i > 0 && ranks_before(s, sentences_[i - 1]))
            throw ContractError("evidence sentences are not in rank order");
    }
}

}  // namespace presuppose
