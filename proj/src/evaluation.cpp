#include "uncal/evaluation.hpp"

#include <algorithm>
#include <map>

#include "uncal/augmentation.hpp"
#include "uncal/elicitation.hpp"

namespace uncal {

using nlohmann::json;

void to_json(json& j, const LedgerRow& r) {
    j = json{{"id", r.example_id},
             {"sample_index", r.sample_index},
             {"answer", r.answer},
             {"expression", r.expression},
             {"confidence", r.confidence ? json(*r.confidence) : json(nullptr)},
             {"correct", r.correct ? json(*r.correct) : json(nullptr)},
             {"status", r.status}};
}

json EvaluationResult::report_json() const {
    json j = report.to_json();
    j["excluded"] = json{{"unparseable", unparseable}, {"unjudged", unjudged}};
    j["flagged_failing"] = flagged_failing;
    return j;
}

EvaluationResult evaluate(const std::vector<QAExample>& dataset,
                          const std::vector<ScoredPrediction>& predictions,
                          const ExpressionMap& map, ModelBackend& judge_backend,
                          const PromptSet& prompts, Logger& log) {
    if (predictions.empty()) throw ConfigError("evaluate: no predictions");
    std::map<std::string, const QAExample*> by_id;
    for (const auto& e : dataset) by_id[e.id] = &e;

    EvaluationResult result;
    result.ledger.resize(predictions.size());

    // ---- strip uncertainty statements
    parallel_for_indexed(predictions.size(), judge_backend.max_parallel(), [&](std::size_t i) {
        const auto& pred = predictions[i];
        LedgerRow row;
        row.example_id = pred.example_id;
        row.sample_index = pred.sample_index;
        if (!by_id.count(pred.example_id))
            throw ConfigError("prediction for unknown example id '" + pred.example_id + "'");
        auto parts = disentangle(pred.raw_answer, map, &judge_backend, &prompts);
        if (parts) {
            row.answer = parts->answer;
            row.expression = parts->expression;
            row.status = "scored";  // provisional until judged
        } else {
            row.answer = pred.raw_answer;
            row.status = "unparseable";
        }
        result.ledger[i] = std::move(row);
    });
    log.event("strip", {{"records", predictions.size()}});

    // ---- inverse-map expressions to bin midpoints
    for (auto& row : result.ledger)
        if (row.status == "scored") row.confidence = map.probability_of(row.expression);
    log.event("inverse_map", {{"records", predictions.size()}});

    // ---- judge stripped answers
    parallel_for_indexed(predictions.size(), judge_backend.max_parallel(), [&](std::size_t i) {
        auto& row = result.ledger[i];
        if (row.status != "scored") return;
        const QAExample* e = by_id.at(row.example_id);
        Verdict v = judge_backend.judge_any(e->question, e->gold_answers, row.answer);
        if (v == Verdict::unjudged)
            row.status = "unjudged";
        else
            row.correct = v == Verdict::yes;
    });

    std::vector<ScoredPoint> points;
    for (const auto& row : result.ledger) {
        if (row.status == "unparseable") ++result.unparseable;
        if (row.status == "unjudged") ++result.unjudged;
        if (row.status == "scored") points.push_back({*row.confidence, *row.correct});
    }
    if (points.empty()) throw ConfigError("evaluate: every record was excluded");
    result.flagged_failing =
        result.unparseable * 10 > static_cast<long>(predictions.size());

    result.report = calibration_report(points, map);
    log.event("ece", {{"ece", result.report.ece}, {"n", result.report.n}});
    log.event("brier", {{"brier", result.report.brier}});
    return result;
}

SelfEvalReport self_eval_report(const std::vector<QAExample>& dataset, Split split,
                                ModelBackend& backend, const ExpressionMap& map,
                                const PromptSet& prompts, double temperature,
                                int samples_per_question, const IsotonicModel* isotonic) {
    std::vector<QAExample> fewshot_split;
    std::vector<const QAExample*> targets;
    for (const auto& e : dataset) {
        if (e.split == Split::fewshot) fewshot_split.push_back(e);
        if (e.split == split) targets.push_back(&e);
    }
    if (targets.empty()) throw ConfigError("self-eval split is empty");
    std::sort(targets.begin(), targets.end(),
              [](const QAExample* a, const QAExample* b) { return a->id < b->id; });
    auto exemplars = fewshot_exemplars(fewshot_split);

    struct Row {
        const QAExample* example;
        int sample;
        std::string answer;
        std::optional<double> confidence;
        std::optional<bool> correct;
    };
    std::vector<Row> rows;
    for (const auto* e : targets)
        for (int k = 0; k < samples_per_question; ++k) rows.push_back({e, k, "", {}, {}});

    parallel_for_indexed(targets.size(), backend.max_parallel(), [&](std::size_t qi) {
        const QAExample* e = targets[qi];
        auto completions =
            backend.generate(prompts.render_answer(e->question), temperature,
                             samples_per_question);
        for (int k = 0; k < samples_per_question; ++k)
            rows[qi * static_cast<std::size_t>(samples_per_question) +
                 static_cast<std::size_t>(k)]
                .answer = completions[static_cast<std::size_t>(k)];
    });
    parallel_for_indexed(rows.size(), backend.max_parallel(), [&](std::size_t i) {
        auto& row = rows[i];
        row.confidence =
            self_eval_confidence(prompts, exemplars, row.example->question, row.answer, backend);
        if (!row.confidence) return;
        Verdict v = backend.judge_any(row.example->question, row.example->gold_answers,
                                      row.answer);
        if (v != Verdict::unjudged) row.correct = v == Verdict::yes;
    });

    SelfEvalReport out;
    std::vector<ScoredPoint> raw_points, iso_points;
    for (const auto& row : rows) {
        if (!row.confidence) {
            ++out.unscored;
            continue;
        }
        if (!row.correct.has_value()) {
            ++out.unjudged;
            continue;
        }
        raw_points.push_back({*row.confidence, *row.correct});
        if (isotonic) iso_points.push_back({isotonic->transform(*row.confidence), *row.correct});
    }
    out.raw = calibration_report(raw_points, map);
    if (isotonic) out.post_isotonic = calibration_report(iso_points, map);
    return out;
}

}  // namespace uncal
