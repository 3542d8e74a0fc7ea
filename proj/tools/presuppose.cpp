// presuppose: command-line front end.
#include "presuppose/app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace presuppose;

struct PipelineFlags {
    std::optional<std::string> config;
    std::vector<std::string> sets;
    std::string dataset, corpus, output, family, input_kind, evidence, model, script, fixture, cache_dir;
    std::optional<int> k, concurrency;
    bool mock = false;
    bool resume = false;

    void attach(CLI::App& cmd)
    {
        cmd.add_option("--config,-c", config, "INI configuration file")->check(CLI::ExistingFile);
        cmd.add_option("--set", sets, "Override one setting, section.key=value (repeatable)");
        cmd.add_option("--dataset,-d", dataset, "Dataset file (canonical JSONL or native corpus file)");
        cmd.add_option("--corpus", corpus, "qa2 | crepe | falseqa | custom");
        cmd.add_option("--output,-o", output, "Output JSONL");
        cmd.add_option("--family", family, "fact_verify | direct | generated_evidence | atomic");
        cmd.add_option("--input-kind", input_kind, "question | statement");
        cmd.add_option("--evidence", evidence, "none | gold | retrieved_by_question | retrieved_by_statement");
        cmd.add_option("-k", k, "Evidence sentences (1..10)");
        cmd.add_option("--model", model, "Model id sent to the provider");
        cmd.add_option("--script", script, "Scripted LLM responses (JSON)");
        cmd.add_option("--fixture", fixture, "Offline search fixture (JSON)");
        cmd.add_option("--cache-dir", cache_dir, "Response cache directory");
        cmd.add_option("--concurrency,-j", concurrency, "Questions in flight");
        cmd.add_flag("--mock", mock, "Allow only scripted and fixture providers");
        cmd.add_flag("--resume", resume, "Skip ids already in the output and append");
    }

    app::RunConfig load() const
    {
        std::vector<std::string> overrides;
        auto add = [&](const char* key, const std::string& value) {
            if (!value.empty())
                overrides.push_back(std::string(key) + "=" + value);
        };
        add("run.dataset", dataset);
        add("run.corpus", corpus);
        add("run.output", output);
        add("strategy.family", family);
        add("strategy.input_kind", input_kind);
        add("strategy.evidence_mode", evidence);
        add("llm.model", model);
        add("llm.script", script);
        add("run.cache_dir", cache_dir);
        if (!fixture.empty()) {
            add("search.provider", "fixture");
            add("search.fixture", fixture);
        }
        if (k)
            add("strategy.k", std::to_string(*k));
        if (concurrency)
            add("run.concurrency", std::to_string(*concurrency));
        if (mock)
            add("run.mock", "true");
        overrides.insert(overrides.end(), sets.begin(), sets.end());
        std::optional<std::filesystem::path> file;
        if (config)
            file = *config;
        return app::load_config(file, overrides);
    }
};

struct ReportFlags {
    std::string corpus;
    std::string json;
    double alpha = 0.05;

    void attach(CLI::App& cmd, bool with_alpha = false)
    {
        cmd.add_option("--corpus", corpus, "qa2 | crepe | falseqa | custom");
        cmd.add_option("--json", json, "Also write the report as JSON");
        if (with_alpha)
            cmd.add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    }

    app::ReportOptions options() const
    {
        app::ReportOptions o;
        if (!corpus.empty())
            o.corpus = corpus_from_string(corpus);
        if (!json.empty())
            o.json_out = json;
        o.alpha = alpha;
        return o;
    }
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App cli{"False-assumption identification and evaluation"};
    cli.require_subcommand(1);

    PipelineFlags transform_flags, retrieve_flags, run_flags;
    auto* transform = cli.add_subcommand("transform", "Rewrite questions as statements");
    transform_flags.attach(*transform);
    auto* retrieve = cli.add_subcommand("retrieve", "Collect ranked evidence sentences");
    retrieve_flags.attach(*retrieve);
    auto* run = cli.add_subcommand("run", "Run a strategy and write predictions");
    run_flags.attach(*run);

    std::string preds, preds_b, dataset, tags;
    ReportFlags eval_flags, compare_flags, cost_flags, tag_flags;

    auto* eval = cli.add_subcommand("eval", "Accuracy, precision, recall and F1");
    eval->add_option("predictions", preds)->required()->check(CLI::ExistingFile);
    eval->add_option("dataset", dataset)->required()->check(CLI::ExistingFile);
    eval_flags.attach(*eval);

    auto* compare = cli.add_subcommand("compare", "McNemar test between two prediction files");
    compare->add_option("predictions_a", preds)->required()->check(CLI::ExistingFile);
    compare->add_option("predictions_b", preds_b)->required()->check(CLI::ExistingFile);
    compare->add_option("dataset", dataset)->required()->check(CLI::ExistingFile);
    compare_flags.attach(*compare, true);

    auto* cost = cli.add_subcommand("cost", "Mean tokens, calls and assumptions per question");
    cost->add_option("predictions", preds)->required()->check(CLI::ExistingFile);
    cost_flags.attach(*cost);

    auto* tag = cli.add_subcommand("tag-errors", "Tabulate tagged false positives and negatives");
    tag->add_option("predictions", preds)->required()->check(CLI::ExistingFile);
    tag->add_option("dataset", dataset)->required()->check(CLI::ExistingFile);
    tag->add_option("tags", tags)->required()->check(CLI::ExistingFile);
    tag_flags.attach(*tag);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*transform)
            return app::cmd_transform(transform_flags.load(), std::cerr, transform_flags.resume);
        if (*retrieve)
            return app::cmd_retrieve(retrieve_flags.load(), std::cerr, retrieve_flags.resume);
        if (*run)
            return app::cmd_run(run_flags.load(), std::cerr, run_flags.resume);
        if (*eval)
            return app::cmd_eval(preds, dataset, eval_flags.options(), std::cout);
        if (*compare)
            return app::cmd_compare(preds, preds_b, dataset, compare_flags.options(), std::cout);
        if (*cost)
            return app::cmd_cost(preds, cost_flags.options(), std::cout);
        if (*tag)
            return app::cmd_tag_errors(preds, dataset, tags, tag_flags.options(), std::cout);
    } catch (const app::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
