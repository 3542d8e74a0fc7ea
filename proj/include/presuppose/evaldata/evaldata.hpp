#pragma once

#include "presuppose/core.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace presuppose::evaldata {

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split split);
Split split_from_string(std::string_view name);  // also accepts "dev", "val"

struct DatasetInstance {
    std::string id;
    std::string question;
    Label gold_label = Label::kAllValid;
    std::optional<std::vector<std::string>> gold_evidence;
    Split split = Split::kTest;
    Corpus corpus = Corpus::kCustom;
    // Pre-retrieved passages (CREPE). Written only when non-empty.
    std::vector<std::string> passages;

    friend bool operator==(const DatasetInstance&, const DatasetInstance&) = default;
};

// Schema or content problem in an input file; the message names the line.
class DatasetError : public Error {
public:
    using Error::Error;
};

// ---- canonical JSONL ----------------------------------------------------

nlohmann::ordered_json to_json(const DatasetInstance& instance);
// `where` prefixes error messages (e.g. "data.jsonl:12").
DatasetInstance instance_from_json(const nlohmann::json& j, const std::string& where);

std::vector<DatasetInstance> read_canonical(std::istream& in, const std::string& source = "<input>");
std::vector<DatasetInstance> read_canonical(const std::filesystem::path& path);
void write_canonical(std::ostream& out, std::span<const DatasetInstance> instances);
void write_canonical(const std::filesystem::path& path, std::span<const DatasetInstance> instances);

// ---- native corpus files ------------------------------------------------

// RFC 4180: quoted fields, doubled quotes, embedded newlines, CRLF, BOM.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Split from a file name ("train", "dev"/"valid", "test"); test otherwise.
Split split_from_filename(const std::filesystem::path& path);

// CSV with "question" and a false-premise flag column ("label", 1 = false
// premise). Optional "id" column.
std::vector<DatasetInstance> import_falseqa(const std::filesystem::path& path);
// JSONL with "id", "question" and "labels" (["false presupposition"] or
// ["normal"]) or a boolean "has_false_presupposition"; "corrections" become
// gold evidence and "passages" are kept.
std::vector<DatasetInstance> import_crepe(const std::filesystem::path& path);
// CSV with "question", an assumption-validity column and optional evidence.
std::vector<DatasetInstance> import_qa2(const std::filesystem::path& path);

// Canonical JSONL is detected by content; anything else goes to the
// corpus's native importer. A canonical file must match `corpus` unless
// `corpus` is CUSTOM.
std::vector<DatasetInstance> load_dataset(const std::filesystem::path& path, Corpus corpus);

// ---- predictions --------------------------------------------------------

struct AssumptionOutcome {
    std::string text;
    Label label = Label::kAllValid;
    friend bool operator==(const AssumptionOutcome&, const AssumptionOutcome&) = default;
};

struct PredictionRecord {
    std::string id;
    Label label = Label::kAllValid;
    std::string strategy;
    std::optional<std::vector<AssumptionOutcome>> assumptions;
    std::optional<std::string> answer;
    UsageRecord usage;
    std::vector<std::string> flags;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// `assumptions` is null for strategies without a decomposition.
PredictionRecord prediction_from_verdict(const Verdict& verdict, bool decomposed);

nlohmann::ordered_json to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const nlohmann::json& j, const std::string& where);
std::string to_jsonl_line(const PredictionRecord& record);  // no trailing newline
std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source = "<input>");
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

// ---- metrics ------------------------------------------------------------

struct Prediction {
    std::string id;
    Label label = Label::kAllValid;
};

std::vector<Prediction> labels_of(std::span<const PredictionRecord> records);

// Positive class: HAS_FALSE_ASSUMPTION.
struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
    std::int64_t n() const { return tp + fp + fn + tn; }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

enum class HeadlineMetric { kAccuracy, kF1Positive };
HeadlineMetric headline_metric_for(Corpus corpus);
std::string_view to_string(HeadlineMetric metric);  // "Acc" / "F1(pos)"

struct EvalReport {
    std::int64_t n = 0;
    double accuracy = 0.0;
    ClassMetrics positive;  // HAS_FALSE_ASSUMPTION
    ClassMetrics negative;  // ALL_VALID
    Confusion confusion;
    double fp_share = 0.0;
    double fn_share = 0.0;
    HeadlineMetric headline_metric = HeadlineMetric::kAccuracy;
    double headline = 0.0;

    nlohmann::ordered_json to_json() const;
};

// Predictions and golds must cover the same ids exactly once.
class CoverageError : public ContractError {
public:
    CoverageError(std::vector<std::string> missing, std::vector<std::string> extra,
                  std::vector<std::string> duplicate);
    const std::vector<std::string>& missing() const { return missing_; }
    const std::vector<std::string>& extra() const { return extra_; }
    const std::vector<std::string>& duplicate() const { return duplicate_; }

private:
    std::vector<std::string> missing_;
    std::vector<std::string> extra_;
    std::vector<std::string> duplicate_;
};

Confusion confusion_of(std::span<const Prediction> preds, std::span<const DatasetInstance> golds);
// F1 is 0 when P + R is 0; precision is 0 without predicted members.
ClassMetrics class_metrics(std::int64_t true_pos, std::int64_t false_pos, std::int64_t false_neg);
EvalReport report_from_confusion(const Confusion& confusion, Corpus corpus);
EvalReport evaluate(std::span<const Prediction> preds, std::span<const DatasetInstance> golds,
                    Corpus corpus);

// Shares of false positives and false negatives among all errors.
std::pair<double, double> fp_fn_breakdown(std::span<const Prediction> preds,
                                          std::span<const DatasetInstance> golds);

// ---- significance -------------------------------------------------------

enum class McNemarMethod { kExact, kChi2 };
std::string_view to_string(McNemarMethod method);

struct McNemarResult {
    std::int64_t b = 0;  // A wrong, B right
    std::int64_t c = 0;  // A right, B wrong
    double p_value = 1.0;
    McNemarMethod method = McNemarMethod::kExact;
    double statistic = 0.0;  // chi-square statistic when method is CHI2

    bool significant(double alpha = 0.05) const { return p_value < alpha; }
    nlohmann::ordered_json to_json() const;
};

inline constexpr std::int64_t kMcNemarExactLimit = 25;

// Two-sided exact binomial: min(1, 2 * sum_{i<=min(b,c)} C(b+c, i) / 2^(b+c)).
double mcnemar_exact_p(std::int64_t b, std::int64_t c);
// Continuity-corrected statistic max(|b-c|-1, 0)^2 / (b+c) with 1 df.
double mcnemar_chi2_statistic(std::int64_t b, std::int64_t c);
double mcnemar_chi2_p(std::int64_t b, std::int64_t c);
// Exact when b+c <= 25, chi-square otherwise; b+c == 0 gives p = 1, EXACT.
McNemarResult mcnemar_from_counts(std::int64_t b, std::int64_t c);
McNemarResult mcnemar(std::span<const Prediction> preds_a, std::span<const Prediction> preds_b,
                      std::span<const DatasetInstance> golds);

// ---- cost ---------------------------------------------------------------

struct CostReport {
    std::int64_t n = 0;
    double mean_prompt_tokens = 0.0;
    double mean_completion_tokens = 0.0;
    double mean_llm_calls = 0.0;
    // Over atomic records only; absent when there are none.
    std::optional<double> mean_assumptions;
    std::int64_t atomic_n = 0;
    bool estimated = false;

    bool empty() const { return n == 0; }
    nlohmann::ordered_json to_json() const;
};

// Records whose strategy id starts with "atomic" count toward
// mean_assumptions.
CostReport cost_report(std::span<const PredictionRecord> records);
CostReport cost_report(std::span<const Verdict> verdicts);

// ---- error categories ---------------------------------------------------

enum class ErrorCategory {
    kIrrelevantEvidence,
    kWrongLabel,
    kAmbiguous,
    kCommonsense,
    kDomainKnowledge,
    kAllOther,
};
inline constexpr std::size_t kErrorCategoryCount = 6;

std::string_view to_string(ErrorCategory category);
// Display names ("Domain Knowledge") and snake_case ("domain_knowledge"),
// case-insensitive. Unknown names raise DatasetError.
ErrorCategory error_category_from_string(std::string_view name);

// JSONL {"id": str, "category": str}.
std::map<std::string, ErrorCategory> read_error_tags(std::istream& in, const std::string& source = "<input>");
std::map<std::string, ErrorCategory> read_error_tags(const std::filesystem::path& path);

struct ErrorTabulation {
    struct Row {
        ErrorCategory category;
        std::int64_t fp = 0;
        std::int64_t fn = 0;
        double fp_share = 0.0;  // of tagged false positives
        double fn_share = 0.0;  // of tagged false negatives
    };
    std::vector<Row> rows;  // all six categories, or none for an empty tag set
    std::int64_t fp_total = 0;
    std::int64_t fn_total = 0;
    std::vector<std::string> untagged;  // misclassified ids without a tag

    nlohmann::ordered_json to_json() const;
};

ErrorTabulation tag_errors(std::span<const Prediction> preds, std::span<const DatasetInstance> golds,
                           const std::map<std::string, ErrorCategory>& tags);

// ---- human-readable output ----------------------------------------------

std::string format_report(const EvalReport& report, Corpus corpus);
std::string format_mcnemar(const McNemarResult& result, double alpha = 0.05);
std::string format_cost(const CostReport& report);
std::string format_error_table(const ErrorTabulation& table);

}  // namespace presuppose::evaldata
