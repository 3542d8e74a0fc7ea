#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace presuppose {

inline constexpr int kMaxEvidenceK = 10;

struct EvidenceSentence {
    std::string text;
    double score = 0.0;  // higher is more relevant
    std::string source_url;
    int doc_rank = 1;  // 1-based rank of the source document
    int sent_pos = 0;  // 0-based position inside the document

    friend bool operator==(const EvidenceSentence&, const EvidenceSentence&) = default;
};

// Strict weak order used everywhere evidence is ranked: score descending,
// then doc_rank ascending, then sent_pos ascending, then text.
bool ranks_before(const EvidenceSentence& a, const EvidenceSentence& b);

enum class EvidenceOrigin { kGold, kRetrievedByQuestion, kRetrievedByStatement, kGenerated };

std::string_view to_string(EvidenceOrigin origin);
EvidenceOrigin evidence_origin_from_string(std::string_view name);

// Ordered evidence for one input. Construction validates the ordering
// contract, so a held EvidenceSet is always well-formed.
class EvidenceSet {
public:
    // Throws ContractError if k is outside 1..10, if there are more sentences
    // than k, if a sentence is empty or has a non-finite score, or if the
    // sentences are not in ranks_before order.
    EvidenceSet(std::string question_id, std::vector<EvidenceSentence> sentences,
                EvidenceOrigin origin, int k);

    const std::string& question_id() const { return question_id_; }
    const std::vector<EvidenceSentence>& sentences() const { return sentences_; }
    EvidenceOrigin origin() const { return origin_; }
    int k() const { return k_; }
    bool empty() const { return sentences_.empty(); }
    std::size_t size() const { return sentences_.size(); }

    friend bool operator==(const EvidenceSet&, const EvidenceSet&) = default;

private:
    std::string question_id_;
    std::vector<EvidenceSentence> sentences_;
    EvidenceOrigin origin_;
    int k_;
};

}  // namespace presuppose
