#include "presuppose/net/http.hpp"
#include "presuppose/retrieval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace presuppose::retrieval {

using nlohmann::json;

std::vector<CandidateSentence> candidates_from_documents(std::span<const Document> documents)
{
    std::vector<CandidateSentence> out;
    int rank = 0;
    for (const auto& doc : documents) {
        ++rank;
        int pos = 0;
        for (auto& s : split_sentences(extract_main_content(doc.html)))
            out.push_back(CandidateSentence{std::move(s), doc.url, rank, pos++});
    }
    return out;
}

std::vector<CandidateSentence> candidates_from_passages(std::span<const std::string> passages,
                                                        std::string_view source_label)
{
    std::vector<CandidateSentence> out;
    int rank = 0;
    for (const auto& passage : passages) {
        ++rank;
        int pos = 0;
        for (auto& s : split_sentences(passage))
            out.push_back(CandidateSentence{std::move(s), std::string(source_label), rank, pos++});
    }
    return out;
}

namespace {

std::map<std::string, double> counts(std::string_view text)
{
    std::map<std::string, double> out;
    for (auto& t : tokenize(text))
        out[std::move(t)] += 1.0;
    return out;
}

double norm(const std::map<std::string, double>& v)
{
    double s = 0.0;
    for (const auto& [_, x] : v)
        s += x * x;
    return std::sqrt(s);
}

double sparse_cosine(const std::map<std::string, double>& a, double na,
                     const std::map<std::string, double>& b)
{
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    double dot = 0.0;
    for (const auto& [t, x] : a) {
        if (const auto it = b.find(t); it != b.end())
            dot += x * it->second;
    }
    return dot / (na * nb);
}

}  // namespace

double lexical_cosine(std::string_view a, std::string_view b)
{
    const auto ca = counts(a);
    return sparse_cosine(ca, norm(ca), counts(b));
}

std::vector<double> LexicalScorer::score(std::string_view query, InputKind,
                                         std::span<const CandidateSentence> candidates)
{
    const auto q = counts(query);
    const double nq = norm(q);
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates)
        out.push_back(sparse_cosine(q, nq, counts(c.text)));
    return out;
}

std::string query_instruction(InputKind kind)
{
    return "Represent the " + std::string(to_string(kind)) + " for retrieving supporting evidence: ";
}

double cosine(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw ContractError("cosine: vectors differ in dimension");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> EmbeddingScorer::score(std::string_view query, InputKind query_kind,
                                           std::span<const CandidateSentence> candidates)
{
    if (candidates.empty())
        return {};
    std::vector<InstructedText> inputs;
    inputs.reserve(candidates.size() + 1);
    inputs.push_back(InstructedText{query_instruction(query_kind), std::string(query)});
    for (const auto& c : candidates)
        inputs.push_back(InstructedText{std::string(kEvidenceInstruction), c.text});
    const auto vectors = provider_.embed(inputs);
    if (vectors.size() != inputs.size())
        throw net::BadResponseError("embedder returned " + std::to_string(vectors.size()) +
                                    " vectors for " + std::to_string(inputs.size()) + " inputs");
    std::vector<double> out;
    out.reserve(candidates.size());
    for (std::size_t i = 1; i < vectors.size(); ++i)
        out.push_back(cosine(vectors[0], vectors[i]));
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config, net::Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper))
{
    if (config_.batch_size == 0)
        config_.batch_size = 1;
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(std::span<const InstructedText> inputs)
{
    net::HttpOptions options;
    options.timeout = config_.timeout;
    if (!config_.api_key.empty())
        options.headers["Authorization"] = "Bearer " + config_.api_key;

    std::vector<std::vector<double>> out;
    out.reserve(inputs.size());
    for (std::size_t begin = 0; begin < inputs.size(); begin += config_.batch_size) {
        const auto end = std::min(inputs.size(), begin + config_.batch_size);
        json body = {{"inputs", json::array()}};
        for (auto i = begin; i < end; ++i)
            body["inputs"].push_back({{"instruction", inputs[i].instruction}, {"text", inputs[i].text}});
        const auto payload = body.dump();
        auto batch = net::with_retry(
            [&] {
                const auto raw = net::http_post_json(config_.url, payload, options);
                try {
                    return json::parse(raw.body).at("embeddings").get<std::vector<std::vector<double>>>();
                } catch (const json::exception& e) {
                    throw net::BadResponseError("malformed embedding payload: " + std::string(e.what()));
                }
            },
            config_.retry, sleeper_);
        if (batch.size() != end - begin)
            throw net::BadResponseError("embedding batch size mismatch");
        for (auto& v : batch)
            out.push_back(std::move(v));
    }
    return out;
}

EvidenceSet rank_sentences(const std::string& question_id,
                           std::span<const CandidateSentence> candidates, std::string_view query,
                           InputKind query_kind, int k, SentenceScorer& scorer,
                           EvidenceOrigin origin)
{
    if (k < 1 || k > kMaxEvidenceK)
        throw ContractError("evidence k must be in 1.." + std::to_string(kMaxEvidenceK) + ", got " +
                            std::to_string(k));
    std::vector<CandidateSentence> usable;
    for (const auto& c : candidates) {
        if (!trim(c.text).empty())
            usable.push_back(c);
    }
    std::vector<EvidenceSentence> ranked;
    if (!usable.empty()) {
        const auto scores = scorer.score(query, query_kind, usable);
        if (scores.size() != usable.size())
            throw net::BadResponseError("scorer returned " + std::to_string(scores.size()) +
                                        " scores for " + std::to_string(usable.size()) + " sentences");
        ranked.reserve(usable.size());
        for (std::size_t i = 0; i < usable.size(); ++i) {
            const double s = std::isfinite(scores[i]) ? scores[i] : 0.0;
            ranked.push_back(EvidenceSentence{usable[i].text, s, usable[i].source_url,
                                              usable[i].doc_rank, usable[i].sent_pos});
        }
        std::sort(ranked.begin(), ranked.end(), ranks_before);
        if (ranked.size() > static_cast<std::size_t>(k))
            ranked.resize(static_cast<std::size_t>(k));
    }
    return EvidenceSet(question_id, std::move(ranked), origin, k);
}

EvidenceSet rank_sentences(const std::string& question_id, std::span<const std::string> candidates,
                           std::string_view query, InputKind query_kind, int k,
                           SentenceScorer& scorer, EvidenceOrigin origin)
{
    std::vector<CandidateSentence> wrapped;
    wrapped.reserve(candidates.size());
    int pos = 0;
    for (const auto& c : candidates)
        wrapped.push_back(CandidateSentence{c, {}, 1, pos++});
    return rank_sentences(question_id, wrapped, query, query_kind, k, scorer, origin);
}

GeneratedEvidence generate_evidence(const std::string& question_id, std::string_view input_text,
                                    llm::CompletionProvider& provider, const std::string& model_id,
                                    const prompts::TemplateSet& templates)
{
    auto request = prompts::render_generate_knowledge(input_text, templates);
    request.model_id = model_id;
    const auto response = provider.complete(request);

    std::string_view body = trim(response.text);
    // Some models echo the cue.
    constexpr std::string_view kCue = "Knowledge:";
    if (body.substr(0, kCue.size()) == kCue)
        body = trim(body.substr(kCue.size()));

    std::vector<EvidenceSentence> sentences;
    int pos = 0;
    for (auto& s : split_sentences(body)) {
        if (sentences.size() == static_cast<std::size_t>(kMaxEvidenceK))
            break;
        sentences.push_back(EvidenceSentence{std::move(s), 1.0, "generated", 1, pos++});
    }
    return GeneratedEvidence{
        EvidenceSet(question_id, std::move(sentences), EvidenceOrigin::kGenerated, kMaxEvidenceK),
        response.usage};
}

EvidenceSet Retriever::retrieve(const std::string& question_id, const std::string& query,
                                InputKind query_kind, int k, EvidenceOrigin origin)
{
    const auto documents = fetch_documents(query, search_, fetcher_);
    const auto candidates = candidates_from_documents(documents);
    return rank_sentences(question_id, candidates, query, query_kind, k, scorer_, origin);
}

EvidenceSet Retriever::rank_passages(const std::string& question_id,
                                     std::span<const std::string> passages, const std::string& query,
                                     InputKind query_kind, int k, EvidenceOrigin origin)
{
    const auto candidates = candidates_from_passages(passages, "passage");
    return rank_sentences(question_id, candidates, query, query_kind, k, scorer_, origin);
}

}  // namespace presuppose::retrieval
