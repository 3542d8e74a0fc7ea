#include "presuppose/strategies/strategies.hpp"

#include "presuppose/net/http.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

namespace presuppose::strategies {

using nlohmann::json;

std::string_view to_string(Family family)
{
    switch (family) {
    case Family::kFactVerify:
        return "fact_verify";
    case Family::kDirect:
        return "direct";
    case Family::kGeneratedEvidence:
        return "generated_evidence";
    case Family::kAtomic:
        return "atomic";
    }
    return "direct";
}

Family family_from_string(std::string_view name)
{
    if (name == "fact_verify")
        return Family::kFactVerify;
    if (name == "direct")
        return Family::kDirect;
    if (name == "generated_evidence")
        return Family::kGeneratedEvidence;
    if (name == "atomic")
        return Family::kAtomic;
    throw ContractError("unknown strategy family '" + std::string(name) + "'");
}

std::string_view to_string(EvidenceMode mode)
{
    switch (mode) {
    case EvidenceMode::kNone:
        return "none";
    case EvidenceMode::kGold:
        return "gold";
    case EvidenceMode::kRetrievedByQuestion:
        return "retrieved_by_question";
    case EvidenceMode::kRetrievedByStatement:
        return "retrieved_by_statement";
    }
    return "none";
}

EvidenceMode evidence_mode_from_string(std::string_view name)
{
    if (name == "none")
        return EvidenceMode::kNone;
    if (name == "gold")
        return EvidenceMode::kGold;
    if (name == "retrieved_by_question")
        return EvidenceMode::kRetrievedByQuestion;
    if (name == "retrieved_by_statement")
        return EvidenceMode::kRetrievedByStatement;
    throw ContractError("unknown evidence mode '" + std::string(name) + "'");
}

void StrategyConfig::validate() const
{
    if (k < 1 || k > kMaxEvidenceK)
        throw ContractError("k must be in 1..10, got " + std::to_string(k));
    if (!(fv_threshold >= 0.0 && fv_threshold <= 1.0))
        throw ContractError("fact-verification threshold must be in [0,1]");
    if (family == Family::kGeneratedEvidence && evidence_mode != EvidenceMode::kNone)
        throw ContractError("generated_evidence requires evidence mode none");
    if (family == Family::kFactVerify && evidence_mode == EvidenceMode::kNone)
        throw ContractError("fact_verify needs an evidence mode (gold or retrieved)");
    if (zero_shot && (evidence_mode != EvidenceMode::kNone || family == Family::kGeneratedEvidence))
        throw ContractError("the zero-shot template takes no evidence");
    if (zero_shot && family == Family::kFactVerify)
        throw ContractError("fact_verify does not prompt a model");
}

std::string StrategyConfig::id() const
{
    std::string out(to_string(family));
    if (family != Family::kAtomic && input_kind == InputKind::kStatement)
        out += "/statement";
    if (evidence_mode != EvidenceMode::kNone) {
        out += "+";
        out += to_string(evidence_mode);
        out += "@k" + std::to_string(k);
    }
    if (family == Family::kFactVerify && fv_threshold != 0.5) {
        std::ostringstream t;
        t << fv_threshold;
        out += "#t" + t.str();
    }
    if (zero_shot)
        out += "+zero_shot";
    if (family == Family::kAtomic && assumption_evidence_from_question &&
        (evidence_mode == EvidenceMode::kRetrievedByQuestion ||
         evidence_mode == EvidenceMode::kRetrievedByStatement))
        out += "+shared_evidence";
    return out;
}

ScriptedVerifier ScriptedVerifier::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractError("cannot open verifier script " + path.string());
    json doc;
    try {
        in >> doc;
        return ScriptedVerifier(doc.get<std::map<std::string, double>>());
    } catch (const json::exception& e) {
        throw ContractError("verifier script " + path.string() + ": " + e.what());
    }
}

double ScriptedVerifier::support_probability(const std::string&, const std::string& claim)
{
    const auto it = probabilities_.find(claim);
    if (it == probabilities_.end())
        throw net::ProviderError("no scripted support probability for claim '" + claim + "'", false);
    return it->second;
}

HttpVerifierProvider::HttpVerifierProvider(HttpVerifierConfig config, net::Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper))
{
}

double HttpVerifierProvider::support_probability(const std::string& document, const std::string& claim)
{
    net::HttpOptions options;
    options.timeout = config_.timeout;
    if (!config_.api_key.empty())
        options.headers["Authorization"] = "Bearer " + config_.api_key;
    const auto body = json{{"document", document}, {"claim", claim}}.dump();
    return net::with_retry(
        [&] {
            const auto raw = net::http_post_json(config_.url, body, options);
            double p = 0.0;
            try {
                p = json::parse(raw.body).at("probability").get<double>();
            } catch (const json::exception& e) {
                throw net::BadResponseError("malformed verifier payload: " + std::string(e.what()));
            }
            if (!(p >= 0.0 && p <= 1.0))
                throw net::BadResponseError("verifier probability outside [0,1]");
            return p;
        },
        config_.retry, sleeper_);
}

Label label_from_support(double support, double threshold)
{
    if (!(support >= 0.0 && support <= 1.0))
        throw ContractError("support probability must be in [0,1]");
    return support >= threshold ? Label::kAllValid : Label::kHasFalseAssumption;
}

std::string parse_statement(std::string_view completion, const std::string& question_id)
{
    constexpr std::string_view kMarker = "Statement:";
    const auto at = completion.find(kMarker);
    if (at == std::string_view::npos) {
        const auto whole = trim(completion);
        if (whole.empty())
            throw TransformFailed(question_id);
        return std::string(whole);
    }
    auto rest = completion.substr(at + kMarker.size());
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        const auto line = trim(rest.substr(0, nl));
        if (!line.empty())
            return std::string(line);
        if (nl == std::string_view::npos)
            break;
        rest.remove_prefix(nl + 1);
    }
    throw TransformFailed(question_id);
}

Pipeline::Pipeline(llm::CompletionProvider& llm, std::string model_id,
                   const prompts::TemplateSet& templates)
    : llm_(llm), model_id_(std::move(model_id)), templates_(templates)
{
    warn_ = [](const std::string& message) {
        static std::mutex mutex;
        std::lock_guard lock(mutex);
        std::cerr << "warning: " << message << '\n';
    };
}

llm::CompletionResponse Pipeline::complete(llm::CompletionRequest request, UsageRecord& usage)
{
    request.model_id = model_id_;
    auto response = llm_.complete(request);
    usage += response.usage;
    return response;
}

retrieval::SentenceScorer& Pipeline::scorer()
{
    if (scorer_ != nullptr)
        return *scorer_;
    if (retriever_ != nullptr)
        return retriever_->scorer();
    return lexical_;
}

retrieval::Retriever& Pipeline::retriever(const std::string& question_id)
{
    if (retriever_ == nullptr)
        throw ContractError("question '" + question_id +
                            "' needs retrieved evidence but no retriever is configured");
    return *retriever_;
}

void Pipeline::add_flag(std::vector<std::string>& flags, std::string_view flag)
{
    if (std::find(flags.begin(), flags.end(), flag) == flags.end())
        flags.emplace_back(flag);
}

Label Pipeline::ask_label(const llm::CompletionRequest& request, const std::string& what,
                          UsageRecord& usage, std::vector<std::string>& flags)
{
    const auto response = complete(request, usage);
    try {
        return prompts::parse_yes_no(response.text);
    } catch (const prompts::UnparseableVerdict&) {
        add_flag(flags, flags::kUnparseableVerdict);
        if (warn_)
            warn_(what + ": unparseable verdict '" + response.text + "', using ALL_VALID");
        return Label::kAllValid;
    }
}

std::optional<EvidenceSet> Pipeline::acquire_evidence(const QuestionInput& input,
                                                      const StrategyConfig& cfg,
                                                      const std::string& text, InputKind kind,
                                                      const std::string& retrieval_query,
                                                      InputKind query_kind)
{
    const auto& qid = input.question.id();
    switch (cfg.evidence_mode) {
    case EvidenceMode::kNone:
        return std::nullopt;
    case EvidenceMode::kGold: {
        if (!input.gold_evidence || input.gold_evidence->empty())
            return EvidenceSet(qid, {}, EvidenceOrigin::kGold, cfg.k);
        const auto candidates = retrieval::candidates_from_passages(*input.gold_evidence, "gold");
        return retrieval::rank_sentences(qid, candidates, text, kind, cfg.k, scorer(),
                                         EvidenceOrigin::kGold);
    }
    case EvidenceMode::kRetrievedByQuestion:
    case EvidenceMode::kRetrievedByStatement: {
        const auto origin = cfg.evidence_mode == EvidenceMode::kRetrievedByQuestion
                                ? EvidenceOrigin::kRetrievedByQuestion
                                : EvidenceOrigin::kRetrievedByStatement;
        if (!input.passages.empty()) {
            const auto candidates = retrieval::candidates_from_passages(input.passages, "passage");
            return retrieval::rank_sentences(qid, candidates, retrieval_query, query_kind, cfg.k,
                                             scorer(), origin);
        }
        return retriever(qid).retrieve(qid, retrieval_query, query_kind, cfg.k, origin);
    }
    }
    return std::nullopt;
}

StatementRecord Pipeline::transform_question(const QuestionRecord& question, UsageRecord& usage)
{
    const auto response = complete(prompts::render_transform(question, templates_), usage);
    return StatementRecord{question.id(), parse_statement(response.text, question.id())};
}

Label Pipeline::fact_verify(const EvidenceSet& evidence, const std::string& claim, double threshold)
{
    if (verifier_ == nullptr)
        throw ContractError("fact verification needs a verifier provider");
    std::string document;
    for (const auto& s : evidence.sentences()) {
        if (!document.empty())
            document += ' ';
        document += s.text;
    }
    return label_from_support(verifier_->support_probability(document, claim), threshold);
}

PreparedInput Pipeline::prepare(const QuestionInput& input, const StrategyConfig& cfg,
                               UsageRecord& usage, std::vector<std::string>& flags)
{
    const auto& q = input.question;
    std::optional<std::string> statement;
    auto get_statement = [&]() -> const std::string& {
        if (!statement) {
            try {
                statement = transform_question(q, usage).text;
            } catch (const TransformFailed&) {
                add_flag(flags, flags::kTransformFailed);
                if (warn_)
                    warn_(q.id() + ": transformation failed, using the question text");
                statement = q.text();
            }
        }
        return *statement;
    };

    const auto kind = cfg.input_kind;
    PreparedInput out;
    out.input_text = kind == InputKind::kStatement ? get_statement() : q.text();

    if (cfg.family == Family::kGeneratedEvidence) {
        auto generated = retrieval::generate_evidence(q.id(), out.input_text, llm_, model_id_, templates_);
        usage += generated.usage;
        out.evidence = std::move(generated.evidence);
    } else if (cfg.evidence_mode == EvidenceMode::kRetrievedByStatement) {
        out.evidence =
            acquire_evidence(input, cfg, out.input_text, kind, get_statement(), InputKind::kStatement);
    } else {
        out.evidence = acquire_evidence(input, cfg, out.input_text, kind, q.text(), InputKind::kQuestion);
    }
    if (out.evidence && out.evidence->empty()) {
        add_flag(flags, flags::kNoEvidence);
        if (warn_)
            warn_(q.id() + ": no evidence, using the no-evidence prompt");
    }
    return out;
}

Verdict Pipeline::identify(const QuestionInput& input, const StrategyConfig& cfg)
{
    cfg.validate();
    const auto& q = input.question;
    UsageRecord usage;
    std::vector<std::string> flags;
    const auto prepared = prepare(input, cfg, usage, flags);
    const auto& input_text = prepared.input_text;
    const auto& evidence = prepared.evidence;
    const auto kind = cfg.input_kind;

    Label label;
    if (cfg.family == Family::kFactVerify) {
        label = fact_verify(*evidence, input_text, cfg.fv_threshold);
    } else if (cfg.zero_shot) {
        label = ask_label(prompts::render_identify_zero_shot(input_text, kind, templates_), q.id(),
                          usage, flags);
    } else {
        const EvidenceSet* used = evidence && !evidence->empty() ? &*evidence : nullptr;
        label = ask_label(prompts::render_identify(input_text, kind, used, templates_), q.id(), usage,
                          flags);
    }
    return Verdict(q.id(), label, {}, verbalize({}, q, label), cfg.id(), usage, std::move(flags));
}

std::vector<AtomicAssumption> Pipeline::generate_assumptions(const QuestionRecord& question,
                                                             UsageRecord& usage)
{
    const auto response = complete(prompts::render_atomic(question, templates_), usage);
    return prompts::parse_enumeration(response.text, question.id());
}

ValidatedAssumption Pipeline::validate_assumption(const AtomicAssumption& assumption,
                                                  const QuestionInput& input,
                                                  const StrategyConfig& cfg, UsageRecord& usage,
                                                  std::vector<std::string>& flags)
{
    auto evidence = acquire_evidence(input, cfg, assumption.text, InputKind::kStatement,
                                     assumption.text, InputKind::kStatement);
    return judge_assumption(assumption, std::move(evidence), cfg, usage, flags);
}

ValidatedAssumption Pipeline::judge_assumption(const AtomicAssumption& assumption,
                                               std::optional<EvidenceSet> evidence,
                                               const StrategyConfig& cfg, UsageRecord& usage,
                                               std::vector<std::string>& flags)
{
    const auto what = assumption.question_id + "#" + std::to_string(assumption.index);
    if (evidence && evidence->empty()) {
        add_flag(flags, flags::kNoEvidence);
        if (warn_)
            warn_(what + ": no evidence, using the no-evidence prompt");
    }
    Label label;
    if (cfg.zero_shot) {
        label = ask_label(
            prompts::render_identify_zero_shot(assumption.text, InputKind::kStatement, templates_),
            what, usage, flags);
    } else {
        const EvidenceSet* used = evidence && !evidence->empty() ? &*evidence : nullptr;
        label = ask_label(
            prompts::render_identify(assumption.text, InputKind::kStatement, used, templates_), what,
            usage, flags);
    }
    std::shared_ptr<const EvidenceSet> kept;
    if (evidence)
        kept = std::make_shared<const EvidenceSet>(std::move(*evidence));
    return ValidatedAssumption{assumption, label, std::move(kept)};
}

Verdict Pipeline::run_atomic(const QuestionInput& input, const StrategyConfig& cfg)
{
    cfg.validate();
    if (cfg.family != Family::kAtomic)
        throw ContractError("run_atomic needs the atomic family");
    const auto& q = input.question;
    UsageRecord usage;
    std::vector<std::string> flags;

    std::vector<AtomicAssumption> assumptions;
    try {
        assumptions = generate_assumptions(q, usage);
    } catch (const prompts::EmptyDecomposition&) {
        if (warn_)
            warn_(q.id() + ": no assumptions generated, identifying directly");
        auto direct_cfg = cfg;
        direct_cfg.family = Family::kDirect;
        direct_cfg.input_kind = InputKind::kQuestion;
        const auto direct = identify(input, direct_cfg);
        flags.emplace_back(flags::kEmptyDecomposition);
        for (const auto& f : direct.flags())
            add_flag(flags, f);
        return Verdict(q.id(), direct.label(), {}, direct.answer_text(), cfg.id(),
                       usage + direct.usage(), std::move(flags));
    }

    // One question-level retrieval shared by every assumption.
    std::optional<EvidenceSet> shared;
    const bool retrieved = cfg.evidence_mode == EvidenceMode::kRetrievedByQuestion ||
                           cfg.evidence_mode == EvidenceMode::kRetrievedByStatement;
    if (retrieved && cfg.assumption_evidence_from_question) {
        std::string query = q.text();
        auto query_kind = InputKind::kQuestion;
        if (cfg.evidence_mode == EvidenceMode::kRetrievedByStatement) {
            try {
                query = transform_question(q, usage).text;
            } catch (const TransformFailed&) {
                add_flag(flags, flags::kTransformFailed);
                if (warn_)
                    warn_(q.id() + ": transformation failed, using the question text");
            }
            query_kind = InputKind::kStatement;
        }
        shared = acquire_evidence(input, cfg, query, query_kind, query, query_kind);
    }

    std::vector<ValidatedAssumption> validated;
    validated.reserve(assumptions.size());
    for (const auto& a : assumptions) {
        if (shared)
            validated.push_back(judge_assumption(a, shared, cfg, usage, flags));
        else
            validated.push_back(validate_assumption(a, input, cfg, usage, flags));
    }

    std::vector<Label> labels;
    for (const auto& v : validated)
        labels.push_back(v.label);
    const auto label = adjudicate(labels);
    auto answer = verbalize(validated, q, label);
    return Verdict(q.id(), label, std::move(validated), std::move(answer), cfg.id(), usage,
                   std::move(flags));
}

Verdict Pipeline::run(const QuestionInput& input, const StrategyConfig& cfg)
{
    if (cfg.family == Family::kAtomic)
        return run_atomic(input, cfg);
    return identify(input, cfg);
}

InterpretationRecord Pipeline::interpret(const QuestionRecord& question, const EvidenceSet& evidence,
                                         UsageRecord& usage)
{
    const auto response = complete(prompts::render_interpret(question, evidence, templates_), usage);
    if (trim(response.text).empty())
        throw InterpretFailed(question.id());
    return InterpretationRecord{question.id(), response.text, evidence};
}

}  // namespace presuppose::strategies
