#include "presuppose/evaldata/evaldata.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

namespace presuppose::evaldata {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_ids(const std::vector<std::string>& ids)
{
    constexpr std::size_t kShown = 20;
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
        if (!out.empty())
            out += ", ";
        out += ids[i];
    }
    if (ids.size() > kShown)
        out += ", ... (" + std::to_string(ids.size()) + " total)";
    return out;
}

std::string coverage_message(const std::vector<std::string>& missing, const std::vector<std::string>& extra,
                             const std::vector<std::string>& duplicate)
{
    std::string out = "predictions do not cover the dataset exactly once";
    if (!missing.empty())
        out += "; missing: " + join_ids(missing);
    if (!extra.empty())
        out += "; extra: " + join_ids(extra);
    if (!duplicate.empty())
        out += "; duplicate: " + join_ids(duplicate);
    return out;
}

// Gold id -> predicted label, validating exact coverage.
std::unordered_map<std::string, Label> match(std::span<const Prediction> preds,
                                             std::span<const DatasetInstance> golds)
{
    std::unordered_map<std::string, Label> by_id;
    std::vector<std::string> duplicate;
    for (const auto& p : preds) {
        if (!by_id.emplace(p.id, p.label).second)
            duplicate.push_back(p.id);
    }
    std::set<std::string> gold_ids;
    std::vector<std::string> missing;
    for (const auto& g : golds) {
        if (!gold_ids.insert(g.id).second)
            throw ContractError("dataset holds id '" + g.id + "' more than once");
        if (!by_id.count(g.id))
            missing.push_back(g.id);
    }
    std::vector<std::string> extra;
    for (const auto& p : preds) {
        if (!gold_ids.count(p.id))
            extra.push_back(p.id);
    }
    if (!missing.empty() || !extra.empty() || !duplicate.empty())
        throw CoverageError(std::move(missing), std::move(extra), std::move(duplicate));
    return by_id;
}

double ratio(std::int64_t num, std::int64_t den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ordered_json class_json(const ClassMetrics& m)
{
    ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    return j;
}

std::string fixed(double v, int digits = 4)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

std::string percent(double share)
{
    return fixed(share * 100.0, 1) + "%";
}

}  // namespace

CoverageError::CoverageError(std::vector<std::string> missing, std::vector<std::string> extra,
                             std::vector<std::string> duplicate)
    : ContractError(coverage_message(missing, extra, duplicate)),
      missing_(std::move(missing)),
      extra_(std::move(extra)),
      duplicate_(std::move(duplicate))
{
}

HeadlineMetric headline_metric_for(Corpus corpus)
{
    return corpus == Corpus::kCrepe ? HeadlineMetric::kF1Positive : HeadlineMetric::kAccuracy;
}

std::string_view to_string(HeadlineMetric metric)
{
    return metric == HeadlineMetric::kF1Positive ? "F1(pos)" : "Acc";
}

Confusion confusion_of(std::span<const Prediction> preds, std::span<const DatasetInstance> golds)
{
    const auto by_id = match(preds, golds);
    Confusion c;
    for (const auto& g : golds) {
        const bool predicted_pos = by_id.at(g.id) == Label::kHasFalseAssumption;
        const bool gold_pos = g.gold_label == Label::kHasFalseAssumption;
        if (predicted_pos && gold_pos)
            ++c.tp;
        else if (predicted_pos)
            ++c.fp;
        else if (gold_pos)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

ClassMetrics class_metrics(std::int64_t true_pos, std::int64_t false_pos, std::int64_t false_neg)
{
    ClassMetrics m;
    m.precision = ratio(true_pos, true_pos + false_pos);
    m.recall = ratio(true_pos, true_pos + false_neg);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0
                                         : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

EvalReport report_from_confusion(const Confusion& c, Corpus corpus)
{
    EvalReport r;
    r.confusion = c;
    r.n = c.n();
    r.accuracy = ratio(c.tp + c.tn, r.n);
    r.positive = class_metrics(c.tp, c.fp, c.fn);
    r.negative = class_metrics(c.tn, c.fn, c.fp);
    r.fp_share = ratio(c.fp, c.fp + c.fn);
    r.fn_share = ratio(c.fn, c.fp + c.fn);
    r.headline_metric = headline_metric_for(corpus);
    r.headline = r.headline_metric == HeadlineMetric::kF1Positive ? r.positive.f1 : r.accuracy;
    return r;
}

EvalReport evaluate(std::span<const Prediction> preds, std::span<const DatasetInstance> golds,
                    Corpus corpus)
{
    return report_from_confusion(confusion_of(preds, golds), corpus);
}

std::pair<double, double> fp_fn_breakdown(std::span<const Prediction> preds,
                                          std::span<const DatasetInstance> golds)
{
    const auto c = confusion_of(preds, golds);
    return {ratio(c.fp, c.fp + c.fn), ratio(c.fn, c.fp + c.fn)};
}

ordered_json EvalReport::to_json() const
{
    ordered_json j;
    j["n"] = n;
    j["accuracy"] = accuracy;
    j["positive"] = class_json(positive);
    j["negative"] = class_json(negative);
    j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}};
    j["fp_share"] = fp_share;
    j["fn_share"] = fn_share;
    j["headline_metric"] = to_string(headline_metric);
    j["headline"] = headline;
    return j;
}

// ---- McNemar --------------------------------------------------------------

std::string_view to_string(McNemarMethod method)
{
    return method == McNemarMethod::kExact ? "exact" : "chi2";
}

double mcnemar_exact_p(std::int64_t b, std::int64_t c)
{
    if (b < 0 || c < 0)
        throw ContractError("McNemar counts must be non-negative");
    const auto n = b + c;
    if (n == 0)
        return 1.0;
    const auto m = std::min(b, c);
    double tail = 0.0;
    if (n <= 1000) {
        double term = std::ldexp(1.0, -static_cast<int>(n));
        tail = term;
        for (std::int64_t i = 0; i < m; ++i) {
            term *= static_cast<double>(n - i) / static_cast<double>(i + 1);
            tail += term;
        }
    } else {
        const double log_half_n = -static_cast<double>(n) * std::log(2.0);
        const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
        for (std::int64_t i = 0; i <= m; ++i) {
            const double log_term = lg_n1 - std::lgamma(static_cast<double>(i) + 1.0) -
                                    std::lgamma(static_cast<double>(n - i) + 1.0) + log_half_n;
            tail += std::exp(log_term);
        }
    }
    return std::min(1.0, 2.0 * tail);
}

double mcnemar_chi2_statistic(std::int64_t b, std::int64_t c)
{
    if (b < 0 || c < 0)
        throw ContractError("McNemar counts must be non-negative");
    const auto n = b + c;
    if (n == 0)
        return 0.0;
    const double d = std::max(0.0, std::fabs(static_cast<double>(b - c)) - 1.0);
    return d * d / static_cast<double>(n);
}

double mcnemar_chi2_p(std::int64_t b, std::int64_t c)
{
    // Upper tail of chi-square with one degree of freedom.
    return std::erfc(std::sqrt(mcnemar_chi2_statistic(b, c) / 2.0));
}

McNemarResult mcnemar_from_counts(std::int64_t b, std::int64_t c)
{
    McNemarResult r;
    r.b = b;
    r.c = c;
    if (b + c <= kMcNemarExactLimit) {
        r.method = McNemarMethod::kExact;
        r.p_value = mcnemar_exact_p(b, c);
    } else {
        r.method = McNemarMethod::kChi2;
        r.statistic = mcnemar_chi2_statistic(b, c);
        r.p_value = mcnemar_chi2_p(b, c);
    }
    return r;
}

McNemarResult mcnemar(std::span<const Prediction> preds_a, std::span<const Prediction> preds_b,
                      std::span<const DatasetInstance> golds)
{
    const auto a = match(preds_a, golds);
    const auto bm = match(preds_b, golds);
    std::int64_t b = 0, c = 0;
    for (const auto& g : golds) {
        const bool a_right = a.at(g.id) == g.gold_label;
        const bool b_right = bm.at(g.id) == g.gold_label;
        if (!a_right && b_right)
            ++b;
        else if (a_right && !b_right)
            ++c;
    }
    return mcnemar_from_counts(b, c);
}

ordered_json McNemarResult::to_json() const
{
    ordered_json j;
    j["b"] = b;
    j["c"] = c;
    j["p_value"] = p_value;
    j["method"] = to_string(method);
    if (method == McNemarMethod::kChi2)
        j["statistic"] = statistic;
    j["significant"] = significant();
    return j;
}

// ---- cost -------------------------------------------------------------------

CostReport cost_report(std::span<const PredictionRecord> records)
{
    CostReport r;
    r.n = static_cast<std::int64_t>(records.size());
    if (records.empty())
        return r;
    double prompt = 0, completion = 0, calls = 0, assumptions = 0;
    for (const auto& rec : records) {
        prompt += static_cast<double>(rec.usage.prompt_tokens);
        completion += static_cast<double>(rec.usage.completion_tokens);
        calls += static_cast<double>(rec.usage.llm_calls);
        r.estimated = r.estimated || rec.usage.estimated;
        if (rec.strategy.rfind("atomic", 0) == 0) {
            ++r.atomic_n;
            if (rec.assumptions)
                assumptions += static_cast<double>(rec.assumptions->size());
        }
    }
    const auto n = static_cast<double>(r.n);
    r.mean_prompt_tokens = prompt / n;
    r.mean_completion_tokens = completion / n;
    r.mean_llm_calls = calls / n;
    if (r.atomic_n > 0)
        r.mean_assumptions = assumptions / static_cast<double>(r.atomic_n);
    return r;
}

CostReport cost_report(std::span<const Verdict> verdicts)
{
    std::vector<PredictionRecord> records;
    records.reserve(verdicts.size());
    for (const auto& v : verdicts)
        records.push_back(prediction_from_verdict(v, true));
    return cost_report(records);
}

ordered_json CostReport::to_json() const
{
    ordered_json j;
    j["n"] = n;
    j["mean_prompt_tokens"] = mean_prompt_tokens;
    j["mean_completion_tokens"] = mean_completion_tokens;
    j["mean_llm_calls"] = mean_llm_calls;
    if (mean_assumptions)
        j["mean_assumptions"] = *mean_assumptions;
    else
        j["mean_assumptions"] = nullptr;
    j["atomic_n"] = atomic_n;
    j["estimated"] = estimated;
    j["empty"] = empty();
    return j;
}

// ---- error categories ---------------------------------------------------------

std::string_view to_string(ErrorCategory category)
{
    switch (category) {
    case ErrorCategory::kIrrelevantEvidence:
        return "Irrelevant Evidence";
    case ErrorCategory::kWrongLabel:
        return "Wrong Label";
    case ErrorCategory::kAmbiguous:
        return "Ambiguous";
    case ErrorCategory::kCommonsense:
        return "Commonsense";
    case ErrorCategory::kDomainKnowledge:
        return "Domain Knowledge";
    case ErrorCategory::kAllOther:
        return "All Other";
    }
    return "All Other";
}

ErrorCategory error_category_from_string(std::string_view name)
{
    std::string key;
    for (char c : trim(name)) {
        if (c == '_' || c == '-' || c == ' ')
            key.push_back(' ');
        else
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (int i = 0; i < static_cast<int>(kErrorCategoryCount); ++i) {
        const auto cat = static_cast<ErrorCategory>(i);
        std::string display;
        for (char c : to_string(cat))
            display.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (key == display)
            return cat;
    }
    throw DatasetError("unknown error category '" + std::string(name) + "'");
}

std::map<std::string, ErrorCategory> read_error_tags(std::istream& in, const std::string& source)
{
    std::map<std::string, ErrorCategory> out;
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
            throw DatasetError(where + ": invalid JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.at("id").is_string() || !j.contains("category") ||
            !j.at("category").is_string())
            throw DatasetError(where + ": expected {\"id\": str, \"category\": str}");
        try {
            out[j.at("id").get<std::string>()] = error_category_from_string(j.at("category").get<std::string>());
        } catch (const DatasetError& e) {
            throw DatasetError(where + ": " + e.what());
        }
    }
    return out;
}

std::map<std::string, ErrorCategory> read_error_tags(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    return read_error_tags(in, path.string());
}

ErrorTabulation tag_errors(std::span<const Prediction> preds, std::span<const DatasetInstance> golds,
                           const std::map<std::string, ErrorCategory>& tags)
{
    const auto by_id = match(preds, golds);
    ErrorTabulation t;
    if (tags.empty())
        return t;
    std::array<std::int64_t, kErrorCategoryCount> fp{}, fn{};
    for (const auto& g : golds) {
        const auto predicted = by_id.at(g.id);
        if (predicted == g.gold_label)
            continue;
        const auto it = tags.find(g.id);
        if (it == tags.end()) {
            t.untagged.push_back(g.id);
            continue;
        }
        const auto idx = static_cast<std::size_t>(it->second);
        if (predicted == Label::kHasFalseAssumption) {
            ++fp[idx];
            ++t.fp_total;
        } else {
            ++fn[idx];
            ++t.fn_total;
        }
    }
    for (std::size_t i = 0; i < kErrorCategoryCount; ++i) {
        t.rows.push_back(ErrorTabulation::Row{static_cast<ErrorCategory>(i), fp[i], fn[i],
                                              ratio(fp[i], t.fp_total), ratio(fn[i], t.fn_total)});
    }
    return t;
}

ordered_json ErrorTabulation::to_json() const
{
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["category"] = to_string(r.category);
        row["fp"] = r.fp;
        row["fn"] = r.fn;
        row["fp_share"] = r.fp_share;
        row["fn_share"] = r.fn_share;
        j["rows"].push_back(std::move(row));
    }
    j["fp_total"] = fp_total;
    j["fn_total"] = fn_total;
    j["untagged"] = untagged;
    return j;
}

// ---- text output ------------------------------------------------------------

std::string format_report(const EvalReport& r, Corpus corpus)
{
    std::ostringstream out;
    out << "corpus      " << to_string(corpus) << '\n';
    out << "n           " << r.n << '\n';
    out << "headline    " << to_string(r.headline_metric) << ' ' << fixed(r.headline) << '\n';
    out << "accuracy    " << fixed(r.accuracy) << '\n';
    out << '\n';
    out << std::left << std::setw(20) << "class" << std::setw(11) << "precision" << std::setw(9)
        << "recall" << "f1" << '\n';
    out << std::setw(20) << "false_assumption" << std::setw(11) << fixed(r.positive.precision)
        << std::setw(9) << fixed(r.positive.recall) << fixed(r.positive.f1) << '\n';
    out << std::setw(20) << "all_valid" << std::setw(11) << fixed(r.negative.precision)
        << std::setw(9) << fixed(r.negative.recall) << fixed(r.negative.f1) << '\n';
    out << '\n';
    out << "confusion   tp=" << r.confusion.tp << " fp=" << r.confusion.fp << " fn=" << r.confusion.fn
        << " tn=" << r.confusion.tn << '\n';
    out << "errors      FP " << percent(r.fp_share) << "  FN " << percent(r.fn_share) << '\n';
    return out.str();
}

std::string format_mcnemar(const McNemarResult& r, double alpha)
{
    std::ostringstream out;
    out << "b=" << r.b << " c=" << r.c << " p=" << std::setprecision(6) << r.p_value << " ("
        << to_string(r.method);
    if (r.method == McNemarMethod::kChi2)
        out << ", statistic " << fixed(r.statistic);
    out << ")";
    if (r.significant(alpha))
        out << " *";
    out << '\n';
    return out.str();
}

std::string format_cost(const CostReport& r)
{
    std::ostringstream out;
    out << "questions                 " << r.n << '\n';
    out << "mean prompt tokens        " << fixed(r.mean_prompt_tokens, 2) << '\n';
    out << "mean completion tokens    " << fixed(r.mean_completion_tokens, 2) << '\n';
    out << "mean llm calls            " << fixed(r.mean_llm_calls, 2) << '\n';
    if (r.mean_assumptions)
        out << "mean assumptions          " << fixed(*r.mean_assumptions, 2) << " (over " << r.atomic_n
            << " atomic)\n";
    if (r.estimated)
        out << "token counts include estimates (ceil(chars/4))\n";
    return out.str();
}

std::string format_error_table(const ErrorTabulation& t)
{
    std::ostringstream out;
    if (t.rows.empty()) {
        out << "no error tags\n";
        return out.str();
    }
    out << std::left << std::setw(22) << "Error Type" << std::setw(16) << "FP" << "FN" << '\n';
    for (const auto& r : t.rows) {
        out << std::setw(22) << to_string(r.category) << std::setw(16)
            << (percent(r.fp_share) + " (" + std::to_string(r.fp) + ")")
            << percent(r.fn_share) + " (" + std::to_string(r.fn) + ")" << '\n';
    }
    out << std::setw(22) << "Total" << std::setw(16) << std::to_string(t.fp_total) << t.fn_total << '\n';
    if (!t.untagged.empty())
        out << "untagged errors: " << t.untagged.size() << '\n';
    return out.str();
}

}  // namespace presuppose::evaldata
