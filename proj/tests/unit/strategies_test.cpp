#include "presuppose/strategies/strategies.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <mutex>

using namespace presuppose;
using namespace presuppose::strategies;
using presuppose::testkit::worked_example_answer;
using presuppose::testkit::worked_examples;

namespace {

// Worked-example author that also logs every prompt.
class Author : public llm::CompletionProvider {
public:
    llm::CompletionResponse complete(const llm::CompletionRequest& r) override
    {
        const auto e = override_ ? override_(r) : worked_example_answer(r);
        std::lock_guard lock(m_);
        prompts_.push_back(r.user_text);
        models_.push_back(r.model_id);
        return {e.text, UsageRecord{*e.prompt_tokens, *e.completion_tokens, 1, false}};
    }
    std::function<llm::ScriptEntry(const llm::CompletionRequest&)> override_;
    std::vector<std::string> prompts_;
    std::vector<std::string> models_;
    std::mutex m_;
};

QuestionInput input_for(std::size_t i, bool with_gold = false)
{
    const auto& ex = worked_examples()[i];
    QuestionInput in{QuestionRecord(ex.id, ex.question), std::nullopt, {}};
    if (with_gold)
        in.gold_evidence = ex.evidence;
    return in;
}

StrategyConfig atomic() { return StrategyConfig{.family = Family::kAtomic}; }

}  // namespace

TEST(StrategyConfig, Validation)
{
    EXPECT_NO_THROW(StrategyConfig{}.validate());
    EXPECT_THROW((StrategyConfig{.k = 0}).validate(), ContractError);
    EXPECT_THROW((StrategyConfig{.k = 11}).validate(), ContractError);
    EXPECT_THROW((StrategyConfig{.family = Family::kFactVerify}).validate(), ContractError);
    EXPECT_THROW((StrategyConfig{.family = Family::kFactVerify, .evidence_mode = EvidenceMode::kGold, .fv_threshold = 1.5})
                     .validate(),
                 ContractError);
    EXPECT_THROW((StrategyConfig{.family = Family::kGeneratedEvidence, .evidence_mode = EvidenceMode::kGold}).validate(),
                 ContractError);
    EXPECT_THROW((StrategyConfig{.evidence_mode = EvidenceMode::kGold, .zero_shot = true}).validate(), ContractError);
    EXPECT_NO_THROW((StrategyConfig{.zero_shot = true}).validate());
}

TEST(StrategyConfig, Ids)
{
    EXPECT_EQ(StrategyConfig{}.id(), "direct");
    EXPECT_EQ((StrategyConfig{.family = Family::kAtomic, .evidence_mode = EvidenceMode::kRetrievedByQuestion}).id(),
              "atomic+retrieved_by_question@k10");
    EXPECT_EQ((StrategyConfig{.input_kind = InputKind::kStatement, .evidence_mode = EvidenceMode::kGold, .k = 3}).id(),
              "direct/statement+gold@k3");
    EXPECT_EQ((StrategyConfig{.family = Family::kFactVerify, .evidence_mode = EvidenceMode::kGold, .fv_threshold = 0.7})
                  .id(),
              "fact_verify+gold@k10#t0.7");
    EXPECT_EQ((StrategyConfig{.zero_shot = true}).id(), "direct+zero_shot");
    for (auto f : {Family::kFactVerify, Family::kDirect, Family::kGeneratedEvidence, Family::kAtomic})
        EXPECT_EQ(family_from_string(to_string(f)), f);
    for (auto m : {EvidenceMode::kNone, EvidenceMode::kGold, EvidenceMode::kRetrievedByQuestion,
                   EvidenceMode::kRetrievedByStatement})
        EXPECT_EQ(evidence_mode_from_string(to_string(m)), m);
}

TEST(ParseStatement, MarkerAndFallback)
{
    EXPECT_EQ(parse_statement(" The sky is blue.", "q"), "The sky is blue.");
    EXPECT_EQ(parse_statement("Sure.\nStatement:\n\n  The sky is blue.\nMore", "q"), "The sky is blue.");
    EXPECT_EQ(parse_statement("Statement: X.", "q"), "X.");
    EXPECT_THROW(parse_statement("  \n ", "q"), TransformFailed);
    EXPECT_THROW(parse_statement("Statement:   ", "q"), TransformFailed);
}

TEST(LabelFromSupport, InclusiveThreshold)
{
    EXPECT_EQ(label_from_support(0.5, 0.5), Label::kAllValid);
    EXPECT_EQ(label_from_support(0.4999, 0.5), Label::kHasFalseAssumption);
    EXPECT_EQ(label_from_support(0.0, 0.0), Label::kAllValid);
}

TEST(Atomic, WorkedExamplesMatchMarks)
{
    Author author;
    Pipeline p(author, "m");
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& ex = worked_examples()[i];
        const auto v = p.run(input_for(i), atomic());
        EXPECT_EQ(to_int(v.label()), ex.expected_label) << ex.id;
        ASSERT_EQ(v.per_assumption().size(), ex.assumptions.size());
        for (std::size_t j = 0; j < ex.assumptions.size(); ++j) {
            EXPECT_EQ(v.per_assumption()[j].assumption.text, ex.assumptions[j].first);
            EXPECT_EQ(v.per_assumption()[j].label == Label::kAllValid, ex.assumptions[j].second);
        }
        EXPECT_EQ(v.usage().llm_calls, 1 + static_cast<std::int64_t>(ex.assumptions.size()));
        EXPECT_EQ(v.strategy_id(), "atomic");
    }
    const auto q2 = p.run(input_for(1), atomic());
    EXPECT_EQ(q2.answer_text(),
              "The question contains false assumptions.\n"
              "False: The San Andreas Fault can erupt.\n"
              "False: The San Andreas Fault has erupted during a known time.\n"
              "Holds: The San Andreas Fault is a geological feature.");
    for (const auto& m : author.models_)
        EXPECT_EQ(m, "m");
}

TEST(Atomic, GoldEvidencePerAssumption)
{
    Author author;
    Pipeline p(author, "m");
    auto cfg = atomic();
    cfg.evidence_mode = EvidenceMode::kGold;
    cfg.k = 2;
    const auto v = p.run(input_for(2, true), cfg);
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
    for (const auto& a : v.per_assumption()) {
        ASSERT_NE(a.evidence_used, nullptr);
        EXPECT_EQ(a.evidence_used->size(), 2U);
        EXPECT_EQ(a.evidence_used->origin(), EvidenceOrigin::kGold);
    }
    // evidence prompt with "; "-joined sentences
    bool saw = false;
    for (const auto& pr : author.prompts_)
        saw = saw || pr.find("Input: Pencils were once made using lead.\nEvidence: ") != std::string::npos;
    EXPECT_TRUE(saw);
}

TEST(Atomic, EmptyDecompositionFallsBackToDirect)
{
    Author author;
    author.override_ = [](const llm::CompletionRequest& r) {
        if (r.user_text.find("atomic assumptions are:") != std::string::npos)
            return llm::ScriptEntry{"Nothing to list.", 10, 3};
        return worked_example_answer(r);
    };
    Pipeline p(author, "m");
    const auto v = p.run(input_for(1), atomic());
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
    EXPECT_TRUE(v.per_assumption().empty());
    EXPECT_TRUE(v.has_flag(flags::kEmptyDecomposition));
    EXPECT_EQ(v.usage().llm_calls, 2);
    EXPECT_EQ(v.answer_text(), "The question contains false assumptions.");
}

TEST(Direct, PlainAndStatement)
{
    Author author;
    Pipeline p(author, "m");
    const auto q1 = p.run(input_for(0), StrategyConfig{});
    EXPECT_EQ(q1.label(), Label::kAllValid);
    EXPECT_EQ(q1.usage().llm_calls, 1);
    EXPECT_EQ(q1.usage().prompt_tokens, 151);
    EXPECT_EQ(q1.answer_text(), "The question's assumptions hold.");
    const auto s = p.run(input_for(1), StrategyConfig{.input_kind = InputKind::kStatement});
    EXPECT_EQ(s.label(), Label::kHasFalseAssumption);
    EXPECT_EQ(s.usage().llm_calls, 2);
    EXPECT_NE(author.prompts_.back().find("Input: The San Andreas Fault has erupted before.\n"), std::string::npos);
}

TEST(Direct, UnparseableVerdictDefaultsToAllValid)
{
    Author author;
    author.override_ = [](const llm::CompletionRequest&) { return llm::ScriptEntry{"Perhaps", 5, 1}; };
    std::vector<std::string> warnings;
    Pipeline p(author, "m");
    p.set_warning_sink([&](const std::string& w) { warnings.push_back(w); });
    const auto v = p.run(input_for(1), StrategyConfig{});
    EXPECT_EQ(v.label(), Label::kAllValid);
    EXPECT_TRUE(v.has_flag(flags::kUnparseableVerdict));
    EXPECT_EQ(warnings.size(), 1U);
}

TEST(Direct, TransformFailureUsesQuestion)
{
    Author author;
    author.override_ = [](const llm::CompletionRequest& r) {
        if (r.user_text.find("transform the question") != std::string::npos)
            return llm::ScriptEntry{"Statement:", 5, 1};
        return worked_example_answer(r);
    };
    Pipeline p(author, "m");
    p.set_warning_sink([](const std::string&) {});
    const auto v = p.run(input_for(1), StrategyConfig{.input_kind = InputKind::kStatement});
    EXPECT_TRUE(v.has_flag(flags::kTransformFailed));
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
}

TEST(Direct, GoldEvidenceAndMissingGold)
{
    Author author;
    Pipeline p(author, "m");
    p.set_warning_sink([](const std::string&) {});
    const auto v = p.run(input_for(0, true), StrategyConfig{.evidence_mode = EvidenceMode::kGold});
    EXPECT_EQ(v.label(), Label::kAllValid);
    EXPECT_NE(author.prompts_.back().find("Evidence: "), std::string::npos);
    EXPECT_NE(author.prompts_.back().find("; "), std::string::npos);
    const auto none = p.run(input_for(0, false), StrategyConfig{.evidence_mode = EvidenceMode::kGold});
    EXPECT_TRUE(none.has_flag(flags::kNoEvidence));
    EXPECT_EQ(author.prompts_.back().find("\nEvidence: "), std::string::npos);
}

TEST(Direct, RetrievedWithoutRetrieverIsContractError)
{
    Author author;
    Pipeline p(author, "m");
    EXPECT_THROW(p.run(input_for(0), StrategyConfig{.evidence_mode = EvidenceMode::kRetrievedByQuestion}),
                 ContractError);
    // passages stand in for search
    auto in = input_for(1);
    in.passages = {"The San Andreas Fault is a transform fault. It does not erupt."};
    const auto v = p.run(in, StrategyConfig{.evidence_mode = EvidenceMode::kRetrievedByQuestion});
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
}

TEST(Direct, RetrievedThroughFixtureWeb)
{
    Author author;
    retrieval::FixtureWeb web;
    web.add_results("When did the San Andreas Fault last erupt?", {"https://en.wikipedia.org/wiki/SAF"});
    web.add_results("The San Andreas Fault has erupted before.", {"https://en.wikipedia.org/wiki/SAF"});
    web.add_page("https://en.wikipedia.org/wiki/SAF", "<p>The San Andreas Fault is a transform fault. Faults do not erupt.</p>");
    retrieval::LexicalScorer scorer;
    retrieval::Retriever r(web, web, scorer);
    Pipeline p(author, "m");
    p.set_retriever(&r);
    const auto by_statement = p.run(input_for(1), StrategyConfig{.input_kind = InputKind::kStatement,
                                                                 .evidence_mode = EvidenceMode::kRetrievedByStatement});
    EXPECT_EQ(by_statement.label(), Label::kHasFalseAssumption);
    EXPECT_EQ(by_statement.usage().llm_calls, 2);
    EXPECT_NE(author.prompts_.back().find("Evidence: The San Andreas Fault is a transform fault.; Faults do not erupt."),
              std::string::npos);
}

TEST(Atomic, SharedEvidenceRetrievesOnce)
{
    Author author;
    int searches = 0;
    struct CountingWeb : retrieval::FixtureWeb {
        int* n;
        std::vector<retrieval::SearchHit> search(const std::string& q) override
        {
            ++*n;
            return FixtureWeb::search(q);
        }
    } web;
    web.n = &searches;
    web.add_results("When did they stop using lead in pencils?", {"https://en.wikipedia.org/wiki/Pencil"});
    web.add_page("https://en.wikipedia.org/wiki/Pencil", "<p>Pencil cores are graphite.</p>");
    retrieval::LexicalScorer scorer;
    retrieval::Retriever r(web, web, scorer);
    Pipeline p(author, "m");
    p.set_retriever(&r);
    p.set_warning_sink([](const std::string&) {});
    auto cfg = atomic();
    cfg.evidence_mode = EvidenceMode::kRetrievedByQuestion;
    cfg.assumption_evidence_from_question = true;
    const auto v = p.run(input_for(2), cfg);
    EXPECT_EQ(searches, 1);
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
    EXPECT_EQ(v.strategy_id(), "atomic+retrieved_by_question@k10+shared_evidence");
    for (const auto& a : v.per_assumption())
        EXPECT_EQ(a.evidence_used->sentences().at(0).text, "Pencil cores are graphite.");
    cfg.assumption_evidence_from_question = false;
    searches = 0;
    p.run(input_for(2), cfg);
    EXPECT_EQ(searches, 3);
}

TEST(FactVerify, ThresholdAndEmptyEvidence)
{
    Author author;
    ScriptedVerifier verifier({{"Why are ice cubes mostly clear but icebergs are white?", 0.5},
                               {"When did the San Andreas Fault last erupt?", 0.2}});
    Pipeline p(author, "m");
    p.set_verifier(&verifier);
    p.set_warning_sink([](const std::string&) {});
    const StrategyConfig cfg{.family = Family::kFactVerify, .evidence_mode = EvidenceMode::kGold};
    EXPECT_EQ(p.run(input_for(0, true), cfg).label(), Label::kAllValid);
    EXPECT_EQ(p.run(input_for(1, true), cfg).label(), Label::kHasFalseAssumption);
    const auto empty = p.run(input_for(1, false), cfg);
    EXPECT_TRUE(empty.has_flag(flags::kNoEvidence));
    EXPECT_EQ(empty.usage().llm_calls, 0);
    EXPECT_THROW(p.run(input_for(2, true), cfg), net::ProviderError);
}

TEST(GeneratedEvidenceStrategy, UsesKnowledgePrompt)
{
    Author author;
    author.override_ = [](const llm::CompletionRequest& r) {
        if (r.user_text.find("Generate some knowledge") != std::string::npos)
            return llm::ScriptEntry{"Faults do not erupt. Volcanoes erupt.", 200, 20};
        return worked_example_answer(r);
    };
    Pipeline p(author, "m");
    const auto v = p.run(input_for(1), StrategyConfig{.family = Family::kGeneratedEvidence});
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
    EXPECT_EQ(v.usage().llm_calls, 2);
    EXPECT_NE(author.prompts_.back().find("Evidence: Faults do not erupt.; Volcanoes erupt."), std::string::npos);
}

TEST(ZeroShot, UsesEditableTemplate)
{
    Author author;
    author.override_ = [](const llm::CompletionRequest&) { return llm::ScriptEntry{"yes", 30, 1}; };
    Pipeline p(author, "m");
    const auto v = p.run(input_for(0), StrategyConfig{.zero_shot = true});
    EXPECT_EQ(v.label(), Label::kHasFalseAssumption);
    EXPECT_EQ(author.prompts_.back().rfind("Determine whether the following question", 0), 0U);
}

TEST(Interpret, ReturnsCompletionVerbatim)
{
    Author author;
    author.override_ = [](const llm::CompletionRequest&) { return llm::ScriptEntry{" The fault cannot erupt. ", 1, 1}; };
    Pipeline p(author, "m");
    UsageRecord usage;
    const EvidenceSet ev("q2", {{"Faults do not erupt.", 1.0, "u", 1, 0}}, EvidenceOrigin::kGold, 1);
    const auto r = p.interpret(QuestionRecord("q2", "When did the San Andreas Fault last erupt?"), ev, usage);
    EXPECT_EQ(r.text, " The fault cannot erupt. ");
    EXPECT_EQ(r.evidence_used, ev);
    EXPECT_EQ(usage.llm_calls, 1);
    author.override_ = [](const llm::CompletionRequest&) { return llm::ScriptEntry{"  ", 1, 1}; };
    EXPECT_THROW(p.interpret(QuestionRecord("q2", "x"), ev, usage), InterpretFailed);
}
