#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uncal/backend.hpp"
#include "uncal/expression_map.hpp"
#include "uncal/isotonic.hpp"
#include "uncal/log.hpp"
#include "uncal/metrics.hpp"
#include "uncal/prompts.hpp"
#include "uncal/records.hpp"

namespace uncal {

struct LedgerRow {
    std::string example_id;
    int sample_index = 0;
    std::string answer;               // stripped of uncertainty
    std::string expression;           // canonical, empty if unparseable
    std::optional<double> confidence;
    std::optional<bool> correct;
    std::string status;  // "scored", "unparseable", "unjudged"
};

void to_json(nlohmann::json& j, const LedgerRow& r);

struct EvaluationResult {
    CalibrationReport report;        // over scored rows only
    std::vector<LedgerRow> ledger;   // one row per input prediction, input order
    long unparseable = 0;
    long unjudged = 0;
    bool flagged_failing = false;  // > 10% unparseable

    nlohmann::json report_json() const;  // report + exclusion counts
};

/// Algorithm: strip each augmented prediction, inverse-map its expression to
/// the bin midpoint, judge the stripped answer against all golds, then compute
/// ECE and Brier over the scored records.
EvaluationResult evaluate(const std::vector<QAExample>& dataset,
                          const std::vector<ScoredPrediction>& predictions,
                          const ExpressionMap& map, ModelBackend& judge_backend,
                          const PromptSet& prompts, Logger& log);

struct SelfEvalReport {
    CalibrationReport raw;
    std::optional<CalibrationReport> post_isotonic;
    long unscored = 0;
    long unjudged = 0;
};

/// Reproduces the raw-confidence calibration chart pipeline: sample answers
/// for the split, self-evaluate confidence, judge correctness, and report; a
/// fitted isotonic model adds the post-processed row.
SelfEvalReport self_eval_report(const std::vector<QAExample>& dataset, Split split,
                                ModelBackend& backend, const ExpressionMap& map,
                                const PromptSet& prompts, double temperature,
                                int samples_per_question,
                                const IsotonicModel* isotonic = nullptr);

}  // namespace uncal
