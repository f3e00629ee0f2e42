// End-to-end acceptance checks for the toolkit. Each check prints one
// PASS/FAIL line; the process exits nonzero if any check fails. Everything
// runs offline against the deterministic simulated backend.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "uncal/augmentation.hpp"
#include "uncal/curation.hpp"
#include "uncal/evaluation.hpp"
#include "uncal/metrics.hpp"
#include "uncal/simulated_backend.hpp"

using namespace uncal;
using nlohmann::json;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

// ---- shared end-to-end pipeline run ----------------------------------------

struct PipelineRun {
    std::string curated_bytes;
    std::string report_bytes;
    std::string ledger_bytes;
    std::string trace;
    CurationResult curation;
    EvaluationResult evaluation;
};

struct Harness {
    SimulatedWorld world;
    std::vector<QAExample> dataset;
    CurationConfig config;
    ExpressionMap map = ExpressionMap::builtin();
    PromptSet prompts = PromptSet::builtin();

    Harness() {
        world = generate_world(2000, 404);
        for (const auto& [qid, e] : world.entries) {
            QAExample q;
            q.id = qid;
            q.question = world_question_text(qid);
            q.gold_answers = {e.canonical_answer};
            dataset.push_back(q);
        }
        dataset = split_dataset(dataset, SplitSpec{16, 600, 300, 2024});
        config.samples_per_question = 4;
        config.temperature = 1.0;
        config.mode = AugmentMode::postfixed;
        config.max_per_bin = 200;
        config.seed = 77;
    }

    PipelineRun run() const {
        PipelineRun out;
        std::ostringstream trace;
        Logger log(trace);
        SimulatedBackend backend(world);
        out.curation = curate(dataset, config, backend, map, prompts, log);

        // honest responder: the model replays exactly what curation taught it
        std::vector<ScoredPrediction> predictions;
        int i = 0;
        for (const auto& rec : out.curation.records)
            predictions.push_back({rec.example_id, i++, rec.augmented_answer});
        out.evaluation = evaluate(dataset, predictions, map, backend, prompts, log);
        out.trace = trace.str();

        json curated = json::array();
        for (const auto& rec : out.curation.records) curated.push_back(json(rec));
        std::ostringstream curated_lines;
        for (const auto& obj : curated) curated_lines << obj.dump() << "\n";
        out.curated_bytes = curated_lines.str();
        out.report_bytes = out.evaluation.report_json().dump(2) + "\n";
        std::ostringstream ledger_lines;
        for (const auto& row : out.evaluation.ledger) ledger_lines << json(row).dump() << "\n";
        out.ledger_bytes = ledger_lines.str();
        return out;
    }
};

// ---- the checks ------------------------------------------------------------

void check_isotonic_optimality() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(0x15010ULL);
    for (int trial = 0; trial < 1000; ++trial) {
        auto pairs = uncal::testing::random_instance(rng, 8);
        auto model = fit_isotonic(pairs);
        auto best = uncal::testing::isotonic_oracle(pairs);
        require(std::fabs(model.sse - best.sse) <= 1e-9,
                "fit objective differs from the exhaustive optimum by " +
                    std::to_string(std::fabs(model.sse - best.sse)));
    }
    // monotonicity of the fitted transform on fresh instances
    Rng probe_rng(0xBEEF2ULL);
    auto pairs = uncal::testing::random_instance(probe_rng, 8);
    auto model = fit_isotonic(pairs);
    double prev = -1.0;
    for (int i = 0; i < 10000; ++i) {
        double x = static_cast<double>(i) / 9999.0;
        double y = model.transform(x);
        require(y >= prev, "transform decreased between probe points");
        require(y >= 0.0 && y <= 1.0, "transform left [0,1]");
        prev = y;
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    require(elapsed.count() < 10.0, "isotonic check exceeded its 10s budget");
}

void check_metric_exactness() {
    auto map = ExpressionMap::builtin();
    std::vector<ScoredPoint> a{{0.9, true}, {0.9, true}, {0.9, false}, {0.1, false}};
    require(std::fabs(ece(a, map) - 0.2) <= 1e-12, "frozen ece example mismatch");
    std::vector<ScoredPoint> b{{0.9, true}, {0.1, false}, {0.5, false}};
    require(std::fabs(brier(b) - 0.09) <= 1e-12, "frozen brier example mismatch");

    // independent oracle over the table edges
    const std::vector<double> edges{0.0, 0.02, 0.18, 0.40, 0.63, 0.75, 0.87, 1.0};
    Rng rng(31337ULL);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ScoredPoint> pts;
        std::size_t n = 1 + rng.bounded(300);
        for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(), rng.uniform() < 0.4});

        std::vector<double> conf(edges.size(), 0.0);
        std::vector<long> hits(edges.size(), 0), count(edges.size(), 0);
        double sq = 0.0;
        for (const auto& p : pts) {
            std::size_t bin = edges.size() - 1;
            if (p.confidence < 1.0) {
                bin = 0;
                while (bin + 1 < edges.size() && p.confidence >= edges[bin + 1]) ++bin;
            }
            conf[bin] += p.confidence;
            hits[bin] += p.correct ? 1 : 0;
            ++count[bin];
            double d = p.confidence - (p.correct ? 1.0 : 0.0);
            sq += d * d;
        }
        double expect_ece = 0.0;
        for (std::size_t bin = 0; bin < edges.size(); ++bin) {
            if (count[bin] == 0) continue;
            double acc = static_cast<double>(hits[bin]) / static_cast<double>(count[bin]);
            expect_ece += static_cast<double>(count[bin]) / static_cast<double>(pts.size()) *
                          std::fabs(acc - conf[bin] / static_cast<double>(count[bin]));
        }
        require(std::fabs(ece(pts, map) - expect_ece) <= 1e-12, "ece differs from oracle");
        require(std::fabs(brier(pts) - sq / static_cast<double>(pts.size())) <= 1e-12,
                "brier differs from oracle");
    }
}

void check_expression_table() {
    auto map = ExpressionMap::builtin();
    int prev = static_cast<int>(map.bin_count());
    for (int i = 0; i <= 10000; ++i) {
        double c = static_cast<double>(i) / 10000.0;
        int bin = map.bin_of(c);
        require(bin >= 0 && bin < static_cast<int>(map.bin_count()),
                "grid confidence fell outside every bin");
        require(bin <= prev, "bin assignment is not monotone over the grid");
        prev = bin;
    }
    int expressions = 0;
    for (std::size_t b = 0; b < map.bin_count(); ++b) {
        for (const auto& expr : map.bin(b).expressions) {
            ++expressions;
            double p = map.probability_of(expr);
            require(map.bin_of(p) == static_cast<int>(b),
                    "midpoint of '" + expr + "' leaves its own bin");
            double lo = map.bin(b).lower, hi = map.bin(b).upper;
            require(std::fabs(p - (lo + hi) / 2.0) <= 1e-12,
                    "representative of '" + expr + "' is not the bin midpoint");
        }
    }
    require(expressions == 16, "expression inventory changed");
}

void check_augmentation_round_trip() {
    auto map = ExpressionMap::builtin();
    Rng rng(4242ULL);
    for (std::size_t b = 0; b < map.bin_count(); ++b) {
        for (const auto& expr : map.bin(b).expressions) {
            for (int trial = 0; trial < 50; ++trial) {
                std::string prediction = "answer-" + std::to_string(rng.next() % 1000000) +
                                         " with detail " + std::to_string(trial);
                for (auto mode : {AugmentMode::prefixed, AugmentMode::postfixed}) {
                    auto combined = augment(prediction, expr, mode, map);
                    auto split = disentangle_rules(combined, map);
                    require(split.has_value(), "could not strip '" + combined + "'");
                    require(split->answer == prediction && split->expression == expr,
                            "round trip altered '" + combined + "'");
                }
            }
        }
    }
}

const Harness& harness() {
    static Harness h;
    return h;
}

const PipelineRun& first_run() {
    static PipelineRun run = harness().run();
    return run;
}

void check_end_to_end_calibration() {
    auto start = std::chrono::steady_clock::now();
    const auto& run = first_run();
    require(run.evaluation.unparseable == 0, "honest responder produced unparseable output");
    require(run.evaluation.report.ece <= 0.08,
            "evaluated ece " + std::to_string(run.evaluation.report.ece) + " exceeds 0.08");

    // recalibration: post-processed confidences must not be worse than raw
    const Harness& h = harness();
    SimulatedBackend backend(h.world);
    auto report = self_eval_report(h.dataset, Split::test, backend, h.map, h.prompts, 1.0, 2,
                                   &run.curation.isotonic);
    require(report.post_isotonic.has_value(), "missing post-processed chart row");
    require(report.post_isotonic->ece <= report.raw.ece + 0.02,
            "post-isotonic ece " + std::to_string(report.post_isotonic->ece) +
                " worse than raw " + std::to_string(report.raw.ece));
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    require(elapsed.count() < 120.0, "end-to-end check exceeded its 2min budget");
}

void check_determinism() {
    const auto& a = first_run();
    auto b = harness().run();
    require(a.curated_bytes == b.curated_bytes, "curated records differ between reruns");
    require(a.report_bytes == b.report_bytes, "evaluation report differs between reruns");
    require(a.ledger_bytes == b.ledger_bytes, "evaluation ledger differs between reruns");
    require(!a.curated_bytes.empty(), "curated output is empty");
}

void check_trace() {
    const auto& run = first_run();
    std::vector<std::string> steps;
    std::istringstream lines(run.trace);
    std::string line;
    while (std::getline(lines, line)) steps.push_back(json::parse(line).at("step"));
    std::vector<std::string> expected{"predict",      "confidence_cal", "confidence_train",
                                      "judge_calibration", "fit_isotonic", "transform",
                                      "map_expressions", "augment", "emit",
                                      "strip", "inverse_map", "ece", "brier"};
    require(steps == expected, "pipeline stages missing or out of order in the trace");
}

void check_balance_and_reconciliation() {
    const auto& run = first_run();
    const auto& h = harness();
    std::map<int, long> per_bin;
    for (const auto& rec : run.curation.records) ++per_bin[rec.bin_index];
    for (const auto& [bin, count] : per_bin)
        require(count <= h.config.max_per_bin,
                "bin " + std::to_string(bin) + " exceeds the cap with " +
                    std::to_string(count));

    const json& counts = run.curation.manifest.at("counts");
    long total = counts.at("kept").get<long>();
    for (const auto& [key, value] : counts.at("dropped").items()) total += value.get<long>();
    require(total == counts.at("candidates").get<long>(),
            "kept + dropped does not reconcile with the candidate total");
    require(counts.at("kept").get<long>() ==
                static_cast<long>(run.curation.records.size()),
            "manifest kept count disagrees with the records written");
}

}  // namespace

int main() {
    struct Check {
        const char* name;
        std::function<void()> fn;
    };
    const std::vector<Check> checks{
        {"isotonic regression matches the exhaustive optimum and stays monotone",
         check_isotonic_optimality},
        {"ece and brier match an independent oracle exactly", check_metric_exactness},
        {"expression table is total, monotone, and midpoint-consistent",
         check_expression_table},
        {"augmentation round-trips through disentangling for every expression",
         check_augmentation_round_trip},
        {"curated fine-tuning data evaluates as calibrated end to end",
         check_end_to_end_calibration},
        {"pipeline artifacts are byte-identical across reruns", check_determinism},
        {"pipeline trace reports every stage in order", check_trace},
        {"bin caps hold and the manifest reconciles kept vs dropped",
         check_balance_and_reconciliation},
    };

    int failures = 0;
    for (const auto& check : checks) {
        try {
            check.fn();
            std::cout << "PASS: " << check.name << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL: " << check.name << " (" << e.what() << ")\n";
        }
    }
    return failures == 0 ? 0 : 1;
}
