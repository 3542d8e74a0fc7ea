#include "presuppose/prompts/prompts.hpp"

#include "builtin_templates.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace presuppose::prompts {

std::string_view template_name(TemplateId id, InputKind kind)
{
    switch (id) {
    case TemplateId::kTransform:
        return names::kTransform;
    case TemplateId::kIdentifyPlain:
        return kind == InputKind::kQuestion ? names::kIdentifyPlainQuestion
                                            : names::kIdentifyPlainStatement;
    case TemplateId::kIdentifyWithEvidence:
        return names::kIdentifyWithEvidence;
    case TemplateId::kGenerateKnowledge:
        return names::kGenerateKnowledge;
    case TemplateId::kAtomicGenerate:
        return names::kAtomicGenerate;
    case TemplateId::kInterpret:
        return names::kInterpret;
    }
    throw ContractError("unknown template id");
}

const TemplateSet& TemplateSet::builtin()
{
    static const TemplateSet set = [] {
        TemplateSet s;
        s.set(std::string(names::kTransform), std::string(builtin::kTransform));
        s.set(std::string(names::kIdentifyPlainQuestion), std::string(builtin::kIdentifyPlainQuestion));
        s.set(std::string(names::kIdentifyPlainStatement), std::string(builtin::kIdentifyPlainStatement));
        s.set(std::string(names::kIdentifyWithEvidence), std::string(builtin::kIdentifyWithEvidence));
        s.set(std::string(names::kGenerateKnowledge), std::string(builtin::kGenerateKnowledge));
        s.set(std::string(names::kAtomicGenerate), std::string(builtin::kAtomicGenerate));
        s.set(std::string(names::kInterpret), std::string(builtin::kInterpret));
        s.set(std::string(names::kIdentifyZeroShot), std::string(builtin::kIdentifyZeroShot));
        return s;
    }();
    return set;
}

TemplateSet TemplateSet::from_directory(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw TemplateError("prompt directory " + dir.string() + " does not exist");
    TemplateSet set = builtin();
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt")
            continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        auto body = buffer.str();
        if (!body.empty() && body.back() == '\n')
            body.pop_back();
        set.set(entry.path().stem().string(), std::move(body));
    }
    return set;
}

const std::string& TemplateSet::body(std::string_view name) const
{
    const auto it = bodies_.find(name);
    if (it == bodies_.end())
        throw TemplateError("no prompt template named '" + std::string(name) + "'");
    return it->second;
}

PromptTemplate TemplateSet::get(TemplateId id, InputKind kind) const
{
    return PromptTemplate{id, body(template_name(id, kind))};
}

void TemplateSet::set(std::string name, std::string body)
{
    bodies_.insert_or_assign(std::move(name), std::move(body));
}

std::vector<std::string> TemplateSet::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, _] : bodies_)
        out.push_back(name);
    return out;
}

std::string render_template(std::string_view body,
                            const std::map<std::string, std::string, std::less<>>& slots)
{
    std::string out;
    out.reserve(body.size() + 256);
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            std::size_t j = i + 1;
            while (j < body.size() &&
                   (std::islower(static_cast<unsigned char>(body[j])) || body[j] == '_'))
                ++j;
            if (j < body.size() && body[j] == '}' && j > i + 1) {
                const auto name = body.substr(i + 1, j - i - 1);
                const auto it = slots.find(name);
                if (it == slots.end())
                    throw TemplateError("template slot {" + std::string(name) + "} is unbound");
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out.push_back(body[i]);
        ++i;
    }
    return out;
}

std::string join_evidence(const EvidenceSet& evidence)
{
    std::string out;
    for (const auto& sentence : evidence.sentences()) {
        if (!out.empty())
            out += "; ";
        out += sentence.text;
    }
    return out;
}

namespace {

llm::CompletionRequest make_request(std::string user_text, llm::GenerationParams params)
{
    return llm::CompletionRequest{
        .system_text = {}, .user_text = std::move(user_text), .params = params, .model_id = {}};
}

}  // namespace

llm::CompletionRequest render_transform(const QuestionRecord& question, const TemplateSet& templates)
{
    return make_request(render_template(templates.body(names::kTransform),
                                        {{"question", question.text()}}),
                        llm::GenerationParams::for_generation());
}

llm::CompletionRequest render_identify(std::string_view input_text, InputKind kind,
                                       const EvidenceSet* evidence, const TemplateSet& templates)
{
    if (evidence == nullptr) {
        return make_request(
            render_template(templates.body(template_name(TemplateId::kIdentifyPlain, kind)),
                            {{"input", std::string(input_text)},
                             {"input_kind", std::string(to_string(kind))}}),
            llm::GenerationParams::for_label());
    }
    if (evidence->empty())
        throw ContractError("render_identify: empty evidence set; use the no-evidence template");
    return make_request(render_template(templates.body(names::kIdentifyWithEvidence),
                                        {{"input", std::string(input_text)},
                                         {"input_kind", std::string(to_string(kind))},
                                         {"evidence", join_evidence(*evidence)}}),
                        llm::GenerationParams::for_label());
}

llm::CompletionRequest render_identify_zero_shot(std::string_view input_text, InputKind kind,
                                                 const TemplateSet& templates)
{
    return make_request(render_template(templates.body(names::kIdentifyZeroShot),
                                        {{"input", std::string(input_text)},
                                         {"input_kind", std::string(to_string(kind))}}),
                        llm::GenerationParams::for_label());
}

llm::CompletionRequest render_generate_knowledge(std::string_view input_text,
                                                 const TemplateSet& templates)
{
    return make_request(render_template(templates.body(names::kGenerateKnowledge),
                                        {{"input", std::string(input_text)}}),
                        llm::GenerationParams::for_generation());
}

llm::CompletionRequest render_atomic(const QuestionRecord& question, const TemplateSet& templates)
{
    return make_request(render_template(templates.body(names::kAtomicGenerate),
                                        {{"question", question.text()}}),
                        llm::GenerationParams::for_generation());
}

llm::CompletionRequest render_interpret(const QuestionRecord& question, const EvidenceSet& evidence,
                                        const TemplateSet& templates)
{
    return make_request(render_template(templates.body(names::kInterpret),
                                        {{"question", question.text()},
                                         {"evidence", join_evidence(evidence)}}),
                        llm::GenerationParams::for_generation());
}

Label parse_yes_no(std::string_view text)
{
    std::size_t i = 0;
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i])))
        ++i;
    std::string token;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
        ++i;
    }
    if (token == "yes")
        return Label::kHasFalseAssumption;
    if (token == "no")
        return Label::kAllValid;
    throw UnparseableVerdict(std::string(text));
}

std::vector<AtomicAssumption> parse_enumeration(std::string_view text,
                                                const std::string& question_id)
{
    // "(12) text", "12. text", "12) text". A bare "12." must be followed by
    // whitespace or end of line so decimals such as "1.5 million" are not
    // taken for markers.
    static const std::regex marker(R"(^\s*(?:\(\s*\d+\s*\)|\d+[.)](?=\s|$))\s*(.*)$)");

    std::vector<AtomicAssumption> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::smatch m;
        if (std::regex_match(line, m, marker)) {
            const auto item = trim(std::string_view(line).substr(m.position(1), m.length(1)));
            if (!item.empty())
                out.push_back(AtomicAssumption{.question_id = question_id,
                                               .index = static_cast<int>(out.size()) + 1,
                                               .text = std::string(item)});
        }
        start = end + 1;
    }
    if (out.empty())
        throw EmptyDecomposition(std::string(text));
    return out;
}

}  // namespace presuppose::prompts
