#include "presuppose/evaldata/evaldata.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace presuppose::evaldata {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

[[noreturn]] void fail(const std::string& where, const std::string& message)
{
    throw DatasetError(where + ": " + message);
}

std::vector<std::string> string_list(const json& j, const std::string& where, const char* field)
{
    if (!j.is_array())
        fail(where, std::string("\"") + field + "\" must be a list of strings");
    std::vector<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string())
            fail(where, std::string("\"") + field + "\" must be a list of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

bool corpus_has_gold_evidence(Corpus corpus)
{
    return corpus != Corpus::kFalseQa;
}

}  // namespace

std::string_view to_string(Split split)
{
    switch (split) {
    case Split::kTrain:
        return "train";
    case Split::kValidation:
        return "validation";
    case Split::kTest:
        return "test";
    }
    return "test";
}

Split split_from_string(std::string_view name)
{
    const auto n = lower(name);
    if (n == "train")
        return Split::kTrain;
    if (n == "validation" || n == "dev" || n == "val" || n == "valid")
        return Split::kValidation;
    if (n == "test")
        return Split::kTest;
    throw DatasetError("unknown split '" + std::string(name) + "'");
}

ordered_json to_json(const DatasetInstance& instance)
{
    ordered_json j;
    j["id"] = instance.id;
    j["question"] = instance.question;
    j["gold_label"] = to_int(instance.gold_label);
    if (instance.gold_evidence)
        j["gold_evidence"] = *instance.gold_evidence;
    else
        j["gold_evidence"] = nullptr;
    j["split"] = to_string(instance.split);
    j["corpus"] = to_string(instance.corpus);
    if (!instance.passages.empty())
        j["passages"] = instance.passages;
    return j;
}

DatasetInstance instance_from_json(const json& j, const std::string& where)
{
    if (!j.is_object())
        fail(where, "expected a JSON object");
    DatasetInstance out;
    auto require_string = [&](const char* field) -> std::string {
        if (!j.contains(field) || !j.at(field).is_string())
            fail(where, std::string("missing string field \"") + field + "\"");
        return j.at(field).get<std::string>();
    };
    out.id = require_string("id");
    if (out.id.empty())
        fail(where, "empty id");
    out.question = require_string("question");
    if (trim(out.question).empty())
        fail(where, "empty question");
    if (!j.contains("gold_label"))
        fail(where, "missing field \"gold_label\"");
    const auto& label = j.at("gold_label");
    if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1))
        fail(where, "unknown label value " + label.dump() + " (expected 0 or 1)");
    out.gold_label = label_from_int(label.get<int>());
    try {
        out.split = split_from_string(require_string("split"));
        out.corpus = corpus_from_string(require_string("corpus"));
    } catch (const Error& e) {
        fail(where, e.what());
    }
    if (j.contains("gold_evidence") && !j.at("gold_evidence").is_null()) {
        if (!corpus_has_gold_evidence(out.corpus))
            fail(where, std::string(to_string(out.corpus)) + " ships no gold evidence");
        out.gold_evidence = string_list(j.at("gold_evidence"), where, "gold_evidence");
    }
    if (j.contains("passages") && !j.at("passages").is_null())
        out.passages = string_list(j.at("passages"), where, "passages");
    return out;
}

std::vector<DatasetInstance> read_canonical(std::istream& in, const std::string& source)
{
    std::vector<DatasetInstance> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty())
            continue;
        const auto where = source + ":" + std::to_string(number);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(where, std::string("invalid JSON: ") + e.what());
        }
        out.push_back(instance_from_json(j, where));
    }
    return out;
}

std::vector<DatasetInstance> read_canonical(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    return read_canonical(in, path.string());
}

void write_canonical(std::ostream& out, std::span<const DatasetInstance> instances)
{
    for (const auto& instance : instances)
        out << to_json(instance).dump() << '\n';
}

void write_canonical(const std::filesystem::path& path, std::span<const DatasetInstance> instances)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DatasetError("cannot write " + path.string());
    write_canonical(out, instances);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    if (text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        // A lone empty field is a blank line.
        if (!(row.size() == 1 && row[0].empty()))
            rows.push_back(std::move(row));
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            // handled on '\n'
        } else if (c == '\n' || c == '\r') {
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted)
        throw DatasetError("CSV ends inside a quoted field");
    if (field_started || !field.empty() || !row.empty())
        end_row();
    return rows;
}

Split split_from_filename(const std::filesystem::path& path)
{
    const auto name = lower(path.filename().string());
    if (name.find("train") != std::string::npos)
        return Split::kTrain;
    if (name.find("dev") != std::string::npos || name.find("valid") != std::string::npos ||
        name.find("val.") != std::string::npos || name.find("val_") != std::string::npos)
        return Split::kValidation;
    return Split::kTest;
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string source;

    std::optional<std::size_t> column(std::initializer_list<std::string_view> names) const
    {
        for (auto name : names) {
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (lower(trim(header[i])) == name)
                    return i;
            }
        }
        return std::nullopt;
    }

    std::size_t require(std::initializer_list<std::string_view> names, const char* what) const
    {
        if (auto c = column(names))
            return *c;
        throw DatasetError(source + ": no " + what + " column in the header");
    }

    // Row r is file line r + 2 for single-line records.
    std::string where(std::size_t r) const { return source + ": record " + std::to_string(r + 1); }

    const std::string& cell(std::size_t r, std::size_t c) const
    {
        static const std::string kEmpty;
        return c < rows[r].size() ? rows[r][c] : kEmpty;
    }
};

CsvTable load_csv(const std::filesystem::path& path)
{
    auto rows = parse_csv(read_file(path));
    if (rows.empty())
        throw DatasetError(path.string() + ": empty CSV file");
    CsvTable table;
    table.header = std::move(rows.front());
    table.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    table.source = path.string();
    return table;
}

std::string make_id(std::string_view prefix, Split split, std::size_t index)
{
    return std::string(prefix) + "-" + std::string(to_string(split)) + "-" + std::to_string(index + 1);
}

std::optional<bool> parse_bool(std::string_view raw)
{
    const auto v = lower(trim(raw));
    if (v == "1" || v == "true" || v == "yes" || v == "y" || v == "1.0")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "n" || v == "0.0")
        return false;
    return std::nullopt;
}

}  // namespace

std::vector<DatasetInstance> import_falseqa(const std::filesystem::path& path)
{
    const auto table = load_csv(path);
    const auto q_col = table.require({"question", "questions"}, "question");
    const auto l_col = table.require({"label", "false_premise", "is_false_premise"}, "label");
    const auto id_col = table.column({"id", "qid"});
    const auto split = split_from_filename(path);
    std::vector<DatasetInstance> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        DatasetInstance d;
        d.corpus = Corpus::kFalseQa;
        d.split = split;
        d.question = std::string(trim(table.cell(r, q_col)));
        if (d.question.empty())
            fail(table.where(r), "empty question");
        const auto flag = parse_bool(table.cell(r, l_col));
        if (!flag)
            fail(table.where(r), "unknown label value '" + table.cell(r, l_col) + "'");
        d.gold_label = *flag ? Label::kHasFalseAssumption : Label::kAllValid;
        d.id = id_col && !trim(table.cell(r, *id_col)).empty()
                   ? std::string(trim(table.cell(r, *id_col)))
                   : make_id("falseqa", split, r);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<DatasetInstance> import_qa2(const std::filesystem::path& path)
{
    const auto table = load_csv(path);
    const auto q_col = table.require({"question", "questions"}, "question");
    const auto id_col = table.column({"id", "qid"});
    const auto ev_col = table.column({"evidence", "gold_evidence", "supporting_evidence"});
    // Either column polarity is accepted.
    const auto valid_col = table.column({"all_assumptions_valid", "assumptions_valid", "label"});
    const auto invalid_col =
        table.column({"has_invalid_assumption", "has_questionable_assumption", "has_false_assumption"});
    if (!valid_col && !invalid_col)
        throw DatasetError(table.source + ": no assumption-validity column in the header");
    const auto split = split_from_filename(path);

    std::vector<DatasetInstance> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        DatasetInstance d;
        d.corpus = Corpus::kQa2;
        d.split = split;
        d.question = std::string(trim(table.cell(r, q_col)));
        if (d.question.empty())
            fail(table.where(r), "empty question");
        if (valid_col) {
            const auto raw = lower(trim(table.cell(r, *valid_col)));
            if (raw == "has_invalid" || raw == "invalid")
                d.gold_label = Label::kHasFalseAssumption;
            else if (raw == "all_valid" || raw == "valid")
                d.gold_label = Label::kAllValid;
            else if (const auto b = parse_bool(raw))
                d.gold_label = *b ? Label::kAllValid : Label::kHasFalseAssumption;
            else
                fail(table.where(r), "unknown label value '" + table.cell(r, *valid_col) + "'");
        } else {
            const auto b = parse_bool(table.cell(r, *invalid_col));
            if (!b)
                fail(table.where(r), "unknown label value '" + table.cell(r, *invalid_col) + "'");
            d.gold_label = *b ? Label::kHasFalseAssumption : Label::kAllValid;
        }
        if (ev_col) {
            const auto ev = trim(table.cell(r, *ev_col));
            if (!ev.empty())
                d.gold_evidence = std::vector<std::string>{std::string(ev)};
        }
        d.id = id_col && !trim(table.cell(r, *id_col)).empty()
                   ? std::string(trim(table.cell(r, *id_col)))
                   : make_id("qa2", split, r);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<DatasetInstance> import_crepe(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    const auto split = split_from_filename(path);
    std::vector<DatasetInstance> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty())
            continue;
        const auto where = path.string() + ":" + std::to_string(number);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(where, std::string("invalid JSON: ") + e.what());
        }
        DatasetInstance d;
        d.corpus = Corpus::kCrepe;
        d.split = split;
        if (!j.contains("question") || !j.at("question").is_string())
            fail(where, "missing string field \"question\"");
        d.question = std::string(trim(j.at("question").get<std::string>()));
        if (d.question.empty())
            fail(where, "empty question");

        std::optional<bool> false_presupposition;
        if (j.contains("has_false_presupposition") && j.at("has_false_presupposition").is_boolean()) {
            false_presupposition = j.at("has_false_presupposition").get<bool>();
        } else {
            std::vector<std::string> labels;
            if (j.contains("labels") && j.at("labels").is_array())
                labels = string_list(j.at("labels"), where, "labels");
            else if (j.contains("label") && j.at("label").is_string())
                labels.push_back(j.at("label").get<std::string>());
            for (const auto& l : labels) {
                const auto v = lower(trim(l));
                if (v.find("false presupposition") != std::string::npos ||
                    v == "false_presupposition")
                    false_presupposition = true;
                else if (v == "normal" && !false_presupposition)
                    false_presupposition = false;
                else if (v != "normal")
                    fail(where, "unknown label value '" + l + "'");
            }
        }
        if (!false_presupposition)
            fail(where, "missing label");
        d.gold_label = *false_presupposition ? Label::kHasFalseAssumption : Label::kAllValid;

        if (j.contains("corrections") && j.at("corrections").is_array()) {
            auto corrections = string_list(j.at("corrections"), where, "corrections");
            std::erase_if(corrections, [](const std::string& s) { return trim(s).empty(); });
            if (!corrections.empty())
                d.gold_evidence = std::move(corrections);
        }
        if (j.contains("passages") && j.at("passages").is_array()) {
            for (const auto& p : j.at("passages")) {
                if (p.is_string())
                    d.passages.push_back(p.get<std::string>());
                else if (p.is_object() && p.contains("text") && p.at("text").is_string())
                    d.passages.push_back(p.at("text").get<std::string>());
                else
                    fail(where, "passages must be strings or objects with \"text\"");
            }
        }
        if (j.contains("id") && (j.at("id").is_string() || j.at("id").is_number()))
            d.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        else
            d.id = make_id("crepe", split, out.size());
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<DatasetInstance> load_dataset(const std::filesystem::path& path, Corpus corpus)
{
    if (!std::filesystem::exists(path))
        throw DatasetError("dataset " + path.string() + " does not exist");
    // Canonical files are JSONL whose first record has a gold_label field.
    bool canonical = false;
    bool blank = true;
    {
        std::ifstream in(path, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty())
                continue;
            blank = false;
            try {
                const auto j = json::parse(line);
                canonical = j.is_object() && j.contains("gold_label");
            } catch (const json::parse_error&) {
                canonical = false;
            }
            break;
        }
    }
    if (blank)
        return {};
    if (canonical) {
        auto instances = read_canonical(path);
        if (corpus != Corpus::kCustom) {
            for (const auto& d : instances) {
                if (d.corpus != corpus)
                    throw DatasetError(path.string() + ": instance '" + d.id + "' belongs to " +
                                       std::string(to_string(d.corpus)) + ", expected " +
                                       std::string(to_string(corpus)));
            }
        }
        return instances;
    }
    switch (corpus) {
    case Corpus::kQa2:
        return import_qa2(path);
    case Corpus::kCrepe:
        return import_crepe(path);
    case Corpus::kFalseQa:
        return import_falseqa(path);
    case Corpus::kCustom:
        break;
    }
    throw DatasetError(path.string() + ": not canonical JSONL and CUSTOM has no native importer");
}

}  // namespace presuppose::evaldata
