#pragma once

#include "presuppose/core.hpp"
#include "presuppose/evaldata/evaldata.hpp"
#include "presuppose/llm/llm.hpp"
#include "presuppose/strategies/strategies.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace presuppose::testkit {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

std::filesystem::path fixture_dir();
std::filesystem::path prompts_dir();
std::filesystem::path cli_path();

// Runs a shell command; returns the exit status and captures stdout+stderr.
struct CommandResult {
    int status = -1;
    std::string output;
};
CommandResult run_command(const std::string& command);
std::string shell_quote(const std::string& text);

// Three worked examples: ice cubes / icebergs, San Andreas Fault, lead in
// pencils, with their statements, evidence fragments and atomic assumptions
// marked as holding or not.
struct WorkedExample {
    std::string id;
    std::string question;
    std::string statement;
    std::vector<std::string> evidence;
    std::vector<std::pair<std::string, bool>> assumptions;  // text, holds
    int expected_label;
};
const std::vector<WorkedExample>& worked_examples();

// Answers every prompt the pipeline sends for the worked examples: statement
// for the transform prompt, the numbered assumptions for the atomic prompt,
// and Yes/No for identification prompts (Yes exactly when the input is a
// failing assumption, or a question/statement whose label is 0).
llm::ScriptEntry worked_example_answer(const llm::CompletionRequest& request);

// Canonical dataset of the worked examples, with the evidence fragments as
// gold evidence.
std::vector<evaldata::DatasetInstance> worked_example_dataset();

// Runs each strategy over the dataset against `answer` and writes every
// exchanged prompt as a replayable script for `model`.
void author_script(const std::filesystem::path& path, std::span<const evaldata::DatasetInstance> dataset,
                   std::span<const strategies::StrategyConfig> configs,
                   const std::function<llm::ScriptEntry(const llm::CompletionRequest&)>& answer,
                   const std::string& model = "mock");

// Native-format corpus file (CSV for QA2 and FALSEQA, JSONL for CREPE) with
// `n` rows, `n_false` of them carrying a false assumption at shuffled
// positions. Questions include commas, quotes and line breaks.
void write_native_corpus(Corpus corpus, const std::filesystem::path& path, int n, int n_false,
                         unsigned seed = 1);

}  // namespace presuppose::testkit
