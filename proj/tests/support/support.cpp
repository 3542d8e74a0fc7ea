#include "support.hpp"

#include "presuppose/app/commands.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

namespace presuppose::testkit {

namespace fs = std::filesystem;

TempDir::TempDir()
{
    std::random_device rd;
    std::ostringstream name;
    name << "presuppose-test-" << std::hex << rd() << rd();
    path_ = fs::temp_directory_path() / name.str();
    fs::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    if (!path.parent_path().empty())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

fs::path fixture_dir() { return PRESUPPOSE_FIXTURE_DIR; }
fs::path prompts_dir() { return PRESUPPOSE_PROMPTS_DIR; }
fs::path cli_path() { return PRESUPPOSE_CLI; }

CommandResult run_command(const std::string& command)
{
    CommandResult result;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    if (pipe == nullptr)
        return result;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), n);
    const int status = pclose(pipe);
    result.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string shell_quote(const std::string& text)
{
    std::string out = "'";
    for (char c : text) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

const std::vector<WorkedExample>& worked_examples()
{
    static const std::vector<WorkedExample> examples = {
        {"q1",
         "Why are ice cubes mostly clear but icebergs are white?",
         "Ice cubes are mostly clear and icebergs are white.",
         {"Commercially made ice cubes may be clear.",
          "Icebergs are generally white because they are covered in snow.",
          "Although ice by itself is clear, snow usually appears white in color due to diffuse reflection."},
         {{"Ice cubes and icebergs are made of water.", true},
          {"Ice cubes are mostly clear.", true},
          {"Icebergs are white.", true},
          {"Ice cubes and icebergs can be different in color despite they are made of the same material.", true}},
         1},
        {"q2",
         "When did the San Andreas Fault last erupt?",
         "The San Andreas Fault has erupted before.",
         {"The San Andreas Fault is a transform fault.",
          "Transform fault involves no loss of lithosphere at the Earth's surface.",
          "Most volcanic activity happens where lithosphere is being destroyed."},
         {{"The San Andreas Fault is a geological feature.", true},
          {"The San Andreas Fault can erupt.", false},
          {"The San Andreas Fault has erupted during a known time.", false}},
         0},
        {"q3",
         "When did they stop using lead in pencils?",
         "People stopped using lead in pencils.",
         {"Lead has not been used for writing in pencils for centuries.",
          "Because the pencil core is still referred to as \"lead\", people have the misconception that "
          "the graphite in the pencil is lead."},
         {{"Pencils were once made using lead.", false},
          {"Pencils no longer contain lead.", true},
          {"There was a specific time when people stopped using lead in pencils.", false}},
         0},
    };
    return examples;
}

namespace {

// Text after the last occurrence of `marker` up to the end of that line.
std::string last_field(const std::string& text, const std::string& marker)
{
    const auto pos = text.rfind(marker);
    if (pos == std::string::npos)
        return {};
    const auto start = pos + marker.size();
    const auto end = text.find('\n', start);
    return text.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

llm::ScriptEntry worked_example_answer(const llm::CompletionRequest& request)
{
    const auto& prompt = request.user_text;
    const auto& examples = worked_examples();
    auto entry = [](std::string text, std::int64_t completion) {
        return llm::ScriptEntry{std::move(text), 151, completion};
    };

    if (prompt.find("the atomic assumptions are:") != std::string::npos) {
        const auto q = last_field(prompt, "\nQuestion: ");
        for (const auto& ex : examples) {
            if (ex.question != q)
                continue;
            std::string out;
            for (std::size_t i = 0; i < ex.assumptions.size(); ++i)
                out += (i ? "\n(" : "(") + std::to_string(i + 1) + ") " + ex.assumptions[i].first;
            return entry(out, 40);
        }
        return entry("I cannot find any assumptions.", 6);
    }
    if (prompt.find("transform the question into a statement") != std::string::npos) {
        const auto q = last_field(prompt, "\nQuestion: ");
        for (const auto& ex : examples)
            if (ex.question == q)
                return entry(" " + ex.statement, 12);
        return entry(q, 12);
    }
    const auto input = last_field(prompt, "\nInput: ");
    for (const auto& ex : examples) {
        if (input == ex.question || input == ex.statement)
            return entry(ex.expected_label == 0 ? " Yes" : " No", 1);
        for (const auto& [text, holds] : ex.assumptions)
            if (input == text)
                return entry(holds ? " No" : " Yes", 1);
    }
    return entry("I am not sure.", 4);
}

void author_script(const fs::path& path, std::span<const evaldata::DatasetInstance> dataset,
                   std::span<const strategies::StrategyConfig> configs,
                   const std::function<llm::ScriptEntry(const llm::CompletionRequest&)>& answer,
                   const std::string& model)
{
    llm::CallbackProvider inner(answer);
    llm::RecordingProvider recorder(inner);
    strategies::Pipeline pipeline(recorder, model);
    for (const auto& cfg : configs)
        for (const auto& d : dataset)
            pipeline.run(app::to_question_input(d), cfg);
    write_file(path, llm::script_to_json(recorder.script()).dump(2) + "\n");
}

void write_native_corpus(Corpus corpus, const fs::path& path, int n, int n_false, unsigned seed)
{
    std::vector<bool> is_false(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n_false; ++i)
        is_false[static_cast<std::size_t>(i)] = true;
    std::mt19937 rng(seed);
    std::shuffle(is_false.begin(), is_false.end(), rng);

    auto question = [](int i) {
        switch (i % 4) {
        case 0: return "Why does item " + std::to_string(i) + " float?";
        case 1: return "When did \"item " + std::to_string(i) + "\" sink, and why?";
        case 2: return "Who made item " + std::to_string(i) + ",\nand where?";
        default: return "How big is item " + std::to_string(i) + "?";
        }
    };
    auto csv = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s)
            out += c == '"' ? std::string("\"\"") : std::string(1, c);
        return out + "\"";
    };

    std::ostringstream out;
    if (corpus == Corpus::kCrepe) {
        for (int i = 0; i < n; ++i) {
            nlohmann::json j = {{"id", "crepe-" + std::to_string(i)},
                                {"question", question(i)},
                                {"labels", {is_false[i] ? "false presupposition" : "normal"}}};
            if (is_false[i])
                j["corrections"] = {"Item " + std::to_string(i) + " does not do that."};
            if (i % 3 == 0)
                j["passages"] = {"Passage about item " + std::to_string(i) + "."};
            out << j.dump() << "\n";
        }
    } else if (corpus == Corpus::kQa2) {
        out << "\xEF\xBB\xBFid,question,all_assumptions_valid,evidence\r\n";
        for (int i = 0; i < n; ++i)
            out << "qa2-" << i << "," << csv(question(i)) << "," << (is_false[i] ? "has_invalid" : "all_valid") << ","
                << (i % 2 ? csv("Evidence for item " + std::to_string(i) + ".") : std::string()) << "\r\n";
    } else {
        out << "question,answer,label\n";
        for (int i = 0; i < n; ++i)
            out << csv(question(i)) << "," << csv("Answer " + std::to_string(i)) << "," << (is_false[i] ? 1 : 0) << "\n";
    }
    write_file(path, out.str());
}

std::vector<evaldata::DatasetInstance> worked_example_dataset()
{
    std::vector<evaldata::DatasetInstance> out;
    for (const auto& ex : worked_examples()) {
        evaldata::DatasetInstance inst;
        inst.id = ex.id;
        inst.question = ex.question;
        inst.gold_label = label_from_int(ex.expected_label);
        inst.gold_evidence = ex.evidence;
        inst.split = evaldata::Split::kTest;
        inst.corpus = Corpus::kCustom;
        out.push_back(inst);
    }
    return out;
}

}  // namespace presuppose::testkit
