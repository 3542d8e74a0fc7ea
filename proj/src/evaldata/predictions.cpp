#include "presuppose/evaldata/evaldata.hpp"

#include <fstream>

namespace presuppose::evaldata {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& message)
{
    throw DatasetError(where + ": " + message);
}

Label read_label(const json& j, const std::string& where)
{
    if (!j.is_number_integer() || (j.get<int>() != 0 && j.get<int>() != 1))
        fail(where, "unknown label value " + j.dump() + " (expected 0 or 1)");
    return label_from_int(j.get<int>());
}

std::int64_t read_count(const json& usage, const char* field, const std::string& where)
{
    if (!usage.contains(field))
        return 0;
    const auto& v = usage.at(field);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        fail(where, std::string("usage.") + field + " must be a non-negative integer");
    return v.get<std::int64_t>();
}

}  // namespace

PredictionRecord prediction_from_verdict(const Verdict& verdict, bool decomposed)
{
    PredictionRecord r;
    r.id = verdict.question_id();
    r.label = verdict.label();
    r.strategy = verdict.strategy_id();
    if (decomposed && !verdict.per_assumption().empty()) {
        std::vector<AssumptionOutcome> items;
        for (const auto& v : verdict.per_assumption())
            items.push_back(AssumptionOutcome{v.assumption.text, v.label});
        r.assumptions = std::move(items);
    }
    r.answer = verdict.answer_text();
    r.usage = verdict.usage();
    r.flags = verdict.flags();
    return r;
}

ordered_json to_json(const PredictionRecord& record)
{
    ordered_json j;
    j["id"] = record.id;
    j["label"] = to_int(record.label);
    j["strategy"] = record.strategy;
    if (record.assumptions) {
        j["assumptions"] = ordered_json::array();
        for (const auto& a : *record.assumptions) {
            ordered_json item;
            item["text"] = a.text;
            item["label"] = to_int(a.label);
            j["assumptions"].push_back(std::move(item));
        }
    } else {
        j["assumptions"] = nullptr;
    }
    if (record.answer)
        j["answer"] = *record.answer;
    else
        j["answer"] = nullptr;
    ordered_json usage;
    usage["prompt_tokens"] = record.usage.prompt_tokens;
    usage["completion_tokens"] = record.usage.completion_tokens;
    usage["llm_calls"] = record.usage.llm_calls;
    if (record.usage.estimated)
        usage["estimated"] = true;
    j["usage"] = std::move(usage);
    if (!record.flags.empty())
        j["flags"] = record.flags;
    return j;
}

std::string to_jsonl_line(const PredictionRecord& record)
{
    return to_json(record).dump();
}

PredictionRecord prediction_from_json(const json& j, const std::string& where)
{
    if (!j.is_object())
        fail(where, "expected a JSON object");
    PredictionRecord r;
    if (!j.contains("id") || !j.at("id").is_string() || j.at("id").get<std::string>().empty())
        fail(where, "missing string field \"id\"");
    r.id = j.at("id").get<std::string>();
    if (!j.contains("label"))
        fail(where, "missing field \"label\"");
    r.label = read_label(j.at("label"), where);
    if (j.contains("strategy")) {
        if (!j.at("strategy").is_string())
            fail(where, "\"strategy\" must be a string");
        r.strategy = j.at("strategy").get<std::string>();
    }
    if (j.contains("assumptions") && !j.at("assumptions").is_null()) {
        if (!j.at("assumptions").is_array())
            fail(where, "\"assumptions\" must be a list or null");
        std::vector<AssumptionOutcome> items;
        for (const auto& a : j.at("assumptions")) {
            if (!a.is_object() || !a.contains("text") || !a.at("text").is_string() || !a.contains("label"))
                fail(where, "each assumption needs \"text\" and \"label\"");
            items.push_back(AssumptionOutcome{a.at("text").get<std::string>(), read_label(a.at("label"), where)});
        }
        r.assumptions = std::move(items);
    }
    if (j.contains("answer") && !j.at("answer").is_null()) {
        if (!j.at("answer").is_string())
            fail(where, "\"answer\" must be a string or null");
        r.answer = j.at("answer").get<std::string>();
    }
    if (j.contains("usage")) {
        const auto& u = j.at("usage");
        if (!u.is_object())
            fail(where, "\"usage\" must be an object");
        r.usage.prompt_tokens = read_count(u, "prompt_tokens", where);
        r.usage.completion_tokens = read_count(u, "completion_tokens", where);
        r.usage.llm_calls = read_count(u, "llm_calls", where);
        r.usage.estimated = u.value("estimated", false);
    }
    if (j.contains("flags")) {
        if (!j.at("flags").is_array())
            fail(where, "\"flags\" must be a list");
        for (const auto& f : j.at("flags")) {
            if (!f.is_string())
                fail(where, "\"flags\" must hold strings");
            r.flags.push_back(f.get<std::string>());
        }
    }
    return r;
}

std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source)
{
    std::vector<PredictionRecord> out;
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
        out.push_back(prediction_from_json(j, where));
    }
    return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    return read_predictions(in, path.string());
}

std::vector<Prediction> labels_of(std::span<const PredictionRecord> records)
{
    std::vector<Prediction> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back(Prediction{r.id, r.label});
    return out;
}

}  // namespace presuppose::evaldata
