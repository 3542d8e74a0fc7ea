#include "presuppose/evaldata/evaldata.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sstream>

using namespace presuppose;
using namespace presuppose::testkit;
namespace fs = std::filesystem;

namespace {

std::string cli(const std::string& args)
{
    return shell_quote(cli_path().string()) + " " + args;
}

std::string q(const fs::path& p) { return shell_quote(p.string()); }

strategies::StrategyConfig make(strategies::Family f, strategies::EvidenceMode m, InputKind kind = InputKind::kQuestion)
{
    strategies::StrategyConfig c;
    c.family = f;
    c.evidence_mode = m;
    c.input_kind = kind;
    return c;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        data_ = dir_ / "worked.jsonl";
        script_ = dir_ / "script.json";
        evaldata::write_canonical(data_, worked_example_dataset());
        const std::vector<strategies::StrategyConfig> configs = {
            make(strategies::Family::kAtomic, strategies::EvidenceMode::kGold),
            make(strategies::Family::kDirect, strategies::EvidenceMode::kGold, InputKind::kStatement),
            make(strategies::Family::kDirect, strategies::EvidenceMode::kNone),
        };
        const auto dataset = worked_example_dataset();
        author_script(script_, dataset, configs, worked_example_answer);
    }

    std::string run_args(const fs::path& out, const std::string& extra = "--family atomic --evidence gold") const
    {
        return "run --mock -d " + q(data_) + " --script " + q(script_) + " -o " + q(out) + " " + extra;
    }

    TempDir dir_;
    fs::path data_;
    fs::path script_;
};

}  // namespace

TEST_F(Cli, RunIsByteIdenticalAcrossRuns)
{
    std::vector<std::string> outputs;
    for (int i = 0; i < 3; ++i) {
        const auto out = dir_ / ("out" + std::to_string(i) + ".jsonl");
        const auto r = run_command(cli(run_args(out) + " -j " + std::to_string(i + 1)));
        ASSERT_EQ(r.status, 0) << r.output;
        outputs.push_back(read_file(out));
    }
    EXPECT_EQ(outputs[0], outputs[1]);
    EXPECT_EQ(outputs[0], outputs[2]);

    const auto preds = evaldata::read_predictions(dir_ / "out0.jsonl");
    ASSERT_EQ(preds.size(), 3U);
    const auto& examples = worked_examples();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        EXPECT_EQ(preds[i].id, examples[i].id);
        EXPECT_EQ(to_int(preds[i].label), examples[i].expected_label) << preds[i].id;
        ASSERT_TRUE(preds[i].assumptions);
        ASSERT_EQ(preds[i].assumptions->size(), examples[i].assumptions.size());
        for (std::size_t j = 0; j < examples[i].assumptions.size(); ++j)
            EXPECT_EQ(preds[i].assumptions->at(j).label == Label::kAllValid, examples[i].assumptions[j].second);
        EXPECT_EQ(preds[i].usage.llm_calls, 1 + static_cast<std::int64_t>(examples[i].assumptions.size()));
    }
    EXPECT_TRUE(fs::exists(dir_ / "out0.jsonl.config"));
}

TEST_F(Cli, DirectStrategies)
{
    const auto out = dir_ / "direct.jsonl";
    auto r = run_command(cli(run_args(out, "--family direct --input-kind statement --evidence gold")));
    ASSERT_EQ(r.status, 0) << r.output;
    auto preds = evaldata::read_predictions(out);
    ASSERT_EQ(preds.size(), 3U);
    EXPECT_EQ(to_int(preds[0].label), 1);
    EXPECT_EQ(to_int(preds[1].label), 0);
    EXPECT_EQ(to_int(preds[2].label), 0);
    EXPECT_FALSE(preds[0].assumptions);

    r = run_command(cli(run_args(out, "--family direct")));
    ASSERT_EQ(r.status, 0) << r.output;
    preds = evaldata::read_predictions(out);
    for (const auto& p : preds) {
        EXPECT_EQ(p.usage.prompt_tokens, 151);
        EXPECT_EQ(p.usage.llm_calls, 1);
    }
}

TEST_F(Cli, WarmCacheMakesNoProviderCalls)
{
    const auto cache = dir_ / "cache";
    auto r = run_command(cli(run_args(dir_ / "a.jsonl") + " --cache-dir " + q(cache)));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(r.output.find("provider_calls: 0,"), std::string::npos) << r.output;
    r = run_command(cli(run_args(dir_ / "b.jsonl") + " --cache-dir " + q(cache)));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("provider_calls: 0,"), std::string::npos) << r.output;
    EXPECT_EQ(read_file(dir_ / "a.jsonl"), read_file(dir_ / "b.jsonl"));
}

TEST_F(Cli, ResumeAppendsMissingItems)
{
    const auto full = dir_ / "full.jsonl";
    ASSERT_EQ(run_command(cli(run_args(full))).status, 0);
    const auto text = read_file(full);
    // keep the first line and half of the second, as an interrupted run would
    const auto first = text.find('\n') + 1;
    const auto partial = dir_ / "partial.jsonl";
    write_file(partial, text.substr(0, first + 10));
    const auto r = run_command(cli(run_args(partial) + " --resume"));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("instances: 2 run, 1 resumed, 0 failed"), std::string::npos) << r.output;
    EXPECT_EQ(read_file(partial), text);
}

TEST_F(Cli, EmptyDatasetGivesEmptyOutput)
{
    write_file(dir_ / "empty.jsonl", "");
    const auto out = dir_ / "o.jsonl";
    const auto r = run_command(cli("run --mock -d " + q(dir_ / "empty.jsonl") + " --script " + q(script_) + " -o " + q(out)));
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(read_file(out), "");
}

TEST_F(Cli, MissingScriptEntryFailsThatItemOnly)
{
    auto dataset = worked_example_dataset();
    dataset[1].question = "Is this question unknown to the script?";
    evaldata::write_canonical(dir_ / "mixed.jsonl", dataset);
    const auto out = dir_ / "o.jsonl";
    const auto r = run_command(cli("run --mock --family direct -d " + q(dir_ / "mixed.jsonl") + " --script " + q(script_) +
                                   " -o " + q(out)));
    EXPECT_EQ(r.status, 1) << r.output;
    EXPECT_EQ(evaldata::read_predictions(out).size(), 2U);
    EXPECT_NE(r.output.find(dataset[1].id), std::string::npos);
}

TEST_F(Cli, ReportsAndExitCodes)
{
    const auto out = dir_ / "p.jsonl";
    ASSERT_EQ(run_command(cli(run_args(out))).status, 0);

    auto r = run_command(cli("eval " + q(out) + " " + q(data_) + " --json " + q(dir_ / "eval.json")));
    ASSERT_EQ(r.status, 0) << r.output;
    const auto eval = nlohmann::json::parse(read_file(dir_ / "eval.json"));
    EXPECT_EQ(eval.at("accuracy").get<double>(), 1.0);

    r = run_command(cli("compare " + q(out) + " " + q(out) + " " + q(data_) + " --json " + q(dir_ / "cmp.json")));
    ASSERT_EQ(r.status, 0) << r.output;
    const auto cmp = nlohmann::json::parse(read_file(dir_ / "cmp.json"));
    EXPECT_EQ(cmp.at("b"), 0);
    EXPECT_EQ(cmp.at("c"), 0);
    EXPECT_EQ(cmp.at("p_value").get<double>(), 1.0);

    r = run_command(cli("cost " + q(out) + " --json " + q(dir_ / "cost.json")));
    ASSERT_EQ(r.status, 0) << r.output;
    const auto cost = nlohmann::json::parse(read_file(dir_ / "cost.json"));
    double total = 0;
    for (const auto& ex : worked_examples())
        total += static_cast<double>(ex.assumptions.size());
    EXPECT_NEAR(cost.at("mean_assumptions").get<double>(), total / 3.0, 1e-12);

    // one gold instance more than there are predictions
    auto dataset = worked_example_dataset();
    auto extra = dataset.front();
    extra.id = "q4";
    dataset.push_back(extra);
    evaldata::write_canonical(dir_ / "bigger.jsonl", dataset);
    r = run_command(cli("eval " + q(out) + " " + q(dir_ / "bigger.jsonl")));
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("q4"), std::string::npos) << r.output;

    r = run_command(cli("run --mock --set strategy.k=42 -d " + q(data_) + " --script " + q(script_) + " -o " + q(out)));
    EXPECT_EQ(r.status, 2) << r.output;
    r = run_command(cli("frobnicate"));
    EXPECT_EQ(r.status, 2) << r.output;
}

TEST_F(Cli, TransformAndRetrieve)
{
    const auto out = dir_ / "t.jsonl";
    auto r = run_command(cli("transform --mock -d " + q(data_) + " --script " + q(script_) + " -o " + q(out)));
    ASSERT_EQ(r.status, 0) << r.output;
    std::istringstream lines(read_file(out));
    std::string line;
    std::size_t i = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("id"), worked_examples()[i].id);
        EXPECT_EQ(j.at("statement"), worked_examples()[i].statement);
        ++i;
    }
    EXPECT_EQ(i, 3U);

    r = run_command(cli("retrieve --mock --evidence gold -k 2 -d " + q(data_) + " --script " + q(script_) + " -o " + q(out)));
    ASSERT_EQ(r.status, 0) << r.output;
    std::istringstream ev(read_file(out));
    i = 0;
    while (std::getline(ev, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("origin"), "gold");
        EXPECT_LE(j.at("sentences").size(), 2U);
        EXPECT_GE(j.at("sentences").size(), 1U);
        ++i;
    }
    EXPECT_EQ(i, 3U);
}
