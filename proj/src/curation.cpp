#include "uncal/curation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "uncal/augmentation.hpp"
#include "uncal/elicitation.hpp"
#include "uncal/rng.hpp"
#include "uncal/text.hpp"

namespace uncal {

using nlohmann::json;

CurationConfig CurationConfig::from_json(const json& j) {
    CurationConfig c;
    c.samples_per_question = j.value("samples_per_question", c.samples_per_question);
    c.temperature = j.value("temperature", c.temperature);
    if (j.contains("mode")) c.mode = augment_mode_from_name(j.at("mode").get<std::string>());
    c.max_per_bin = j.value("max_per_bin", c.max_per_bin);
    c.filter_by_correctness = j.value("filter_by_correctness", c.filter_by_correctness);
    c.seed = j.value("seed", c.seed);
    if (c.samples_per_question < 1) throw ConfigError("samples_per_question must be >= 1");
    if (c.max_per_bin < 1) throw ConfigError("max_per_bin must be >= 1");
    return c;
}

json CurationConfig::to_json() const {
    return json{{"samples_per_question", samples_per_question},
                {"temperature", temperature},
                {"mode", augment_mode_name(mode)},
                {"max_per_bin", max_per_bin},
                {"filter_by_correctness", filter_by_correctness},
                {"seed", seed}};
}

json emit_training_manifest(const CurationConfig& /*config*/) {
    return json{{"optimizer", "adam"},      {"batch_size", 32},
                {"epochs", 3},              {"schedule", "cosine"},
                {"lr_warmup_peak", 5e-7},   {"lr_final", 5e-8}};
}

namespace {

struct Candidate {
    const QAExample* example = nullptr;
    ScoredPrediction pred;
    Split split = Split::unassigned;
    std::optional<int> bin_index;
    std::optional<std::string> expression;
    std::optional<std::string> augmented;
};

// Progressive store of backend results, reused across interrupted runs.
class Checkpoint {
public:
    Checkpoint(const std::optional<std::filesystem::path>& path, std::uint64_t config_hash) {
        if (!path) return;
        path_ = *path;
        if (std::filesystem::exists(path_)) {
            bool hash_ok = false;
            std::ifstream in(path_);
            std::string line;
            std::size_t lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty()) continue;
                json obj = json::parse(line, nullptr, false);
                if (obj.is_discarded()) continue;  // torn tail line from an interrupt
                if (obj.contains("_meta")) {
                    hash_ok = obj["_meta"].value("config_hash", std::uint64_t{0}) == config_hash;
                    if (!hash_ok) break;
                    continue;
                }
                if (!hash_ok) break;
                try {
                    ScoredPrediction p = obj.get<ScoredPrediction>();
                    rows_[{p.example_id, p.sample_index}] = std::move(p);
                } catch (const Error&) {
                    continue;
                }
            }
            if (!hash_ok) rows_.clear();
        }
        out_.open(path_, std::ios::trunc);
        out_ << json{{"_meta", {{"config_hash", config_hash}}}}.dump() << "\n";
        for (const auto& [key, p] : rows_) out_ << json(p).dump() << "\n";
        out_.flush();
    }

    const ScoredPrediction* find(const std::string& id, int sample) const {
        auto it = rows_.find({id, sample});
        return it == rows_.end() ? nullptr : &it->second;
    }

    void store(const ScoredPrediction& p) {
        if (!out_.is_open()) return;
        std::lock_guard<std::mutex> lock(mutex_);
        out_ << json(p).dump() << "\n";
        out_.flush();
    }

private:
    std::filesystem::path path_;
    std::map<std::pair<std::string, int>, ScoredPrediction> rows_;
    std::ofstream out_;
    std::mutex mutex_;
};

bool ckpt_flag(const ScoredPrediction& p, const char* name) {
    return p.extra.is_object() && p.extra.value(name, false);
}

}  // namespace

CurationResult curate(const std::vector<QAExample>& dataset, const CurationConfig& config,
                      ModelBackend& backend, const ExpressionMap& map, const PromptSet& prompts,
                      Logger& log,
                      const std::optional<std::filesystem::path>& checkpoint_path) {
    std::vector<QAExample> fewshot_split;
    std::vector<const QAExample*> cal_examples, train_examples;
    for (const auto& e : dataset) {
        switch (e.split) {
            case Split::fewshot: fewshot_split.push_back(e); break;
            case Split::calibration: cal_examples.push_back(&e); break;
            case Split::train: train_examples.push_back(&e); break;
            case Split::test: break;
            case Split::unassigned:
                throw ConfigError("dataset contains untagged examples; run split first");
        }
    }
    if (fewshot_split.empty()) throw ConfigError("dataset has no fewshot split");
    if (cal_examples.empty()) throw ConfigError("dataset has no calibration split");
    if (train_examples.empty()) throw ConfigError("dataset has no train split");

    auto by_id = [](const QAExample* a, const QAExample* b) { return a->id < b->id; };
    std::sort(cal_examples.begin(), cal_examples.end(), by_id);
    std::sort(train_examples.begin(), train_examples.end(), by_id);

    std::uint64_t config_hash = hash_str(config.to_json().dump());
    Checkpoint ckpt(checkpoint_path, config_hash);
    auto exemplars = fewshot_exemplars(fewshot_split);

    std::vector<Candidate> candidates;
    for (const auto* e : cal_examples)
        for (int k = 0; k < config.samples_per_question; ++k)
            candidates.push_back({e, {e->id, k}, Split::calibration, {}, {}, {}});
    std::size_t train_begin = candidates.size();
    for (const auto* e : train_examples)
        for (int k = 0; k < config.samples_per_question; ++k)
            candidates.push_back({e, {e->id, k}, Split::train, {}, {}, {}});

    // ---- predict: one generate call per question, reusing checkpoint rows
    std::vector<const QAExample*> all_examples(cal_examples);
    all_examples.insert(all_examples.end(), train_examples.begin(), train_examples.end());
    std::map<std::string, std::size_t> first_candidate;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].pred.sample_index == 0) first_candidate[candidates[i].example->id] = i;

    parallel_for_indexed(all_examples.size(), backend.max_parallel(), [&](std::size_t qi) {
        const QAExample* e = all_examples[qi];
        std::size_t base = first_candidate.at(e->id);
        bool have_all = true;
        for (int k = 0; k < config.samples_per_question; ++k) {
            const ScoredPrediction* row = ckpt.find(e->id, k);
            if (row) {
                candidates[base + static_cast<std::size_t>(k)].pred = *row;
            } else {
                have_all = false;
            }
        }
        if (have_all) return;
        auto completions =
            backend.generate(prompts.render_answer(e->question), config.temperature,
                             config.samples_per_question);
        for (int k = 0; k < config.samples_per_question; ++k) {
            auto& cand = candidates[base + static_cast<std::size_t>(k)];
            if (ckpt.find(e->id, k)) continue;
            cand.pred.raw_answer = std::string(trim(completions[static_cast<std::size_t>(k)]));
            ckpt.store(cand.pred);
        }
    });
    log.event("predict", {{"questions", all_examples.size()},
                          {"samples", candidates.size()}});

    // ---- confidence on calibration then train (identical routine, D_fs few-shot)
    auto score_range = [&](std::size_t begin, std::size_t end) {
        parallel_for_indexed(end - begin, backend.max_parallel(), [&](std::size_t off) {
            auto& cand = candidates[begin + off];
            if (ckpt_flag(cand.pred, "conf_done")) return;
            cand.pred.raw_confidence = self_eval_confidence(
                prompts, exemplars, cand.example->question, cand.pred.raw_answer, backend);
            // an absent confidence may be a transient backend outage, so only
            // a scored row is terminal for resume purposes
            if (cand.pred.raw_confidence) cand.pred.extra["conf_done"] = true;
            ckpt.store(cand.pred);
        });
    };
    score_range(0, train_begin);
    log.event("confidence_cal", {{"samples", train_begin}});
    score_range(train_begin, candidates.size());
    log.event("confidence_train", {{"samples", candidates.size() - train_begin}});

    // ---- judge correctness where needed (calibration always; train if filtering)
    auto judge_range = [&](std::size_t begin, std::size_t end) {
        parallel_for_indexed(end - begin, backend.max_parallel(), [&](std::size_t off) {
            auto& cand = candidates[begin + off];
            if (ckpt_flag(cand.pred, "judge_done")) return;
            Verdict v = backend.judge_any(cand.example->question, cand.example->gold_answers,
                                          cand.pred.raw_answer);
            if (v != Verdict::unjudged) cand.pred.correct = v == Verdict::yes;
            cand.pred.extra["judge_done"] = true;
            ckpt.store(cand.pred);
        });
    };
    judge_range(0, train_begin);
    if (config.filter_by_correctness) judge_range(train_begin, candidates.size());
    log.event("judge_calibration", {{"samples", train_begin}});

    // ---- fit the isotonic recalibrator on (C_cal, verdict)
    std::vector<IsoPair> pairs;
    long cal_unscored = 0, cal_unjudged = 0;
    for (std::size_t i = 0; i < train_begin; ++i) {
        const auto& p = candidates[i].pred;
        if (!p.raw_confidence) {
            ++cal_unscored;
            continue;
        }
        if (!p.correct.has_value()) {
            ++cal_unjudged;
            continue;
        }
        pairs.push_back({*p.raw_confidence, *p.correct ? 1.0 : 0.0, 1.0});
    }
    IsotonicModel iso = fit_isotonic(pairs);
    log.event("fit_isotonic", {{"pairs", pairs.size()},
                               {"blocks", iso.block_x.size()},
                               {"cal_unscored", cal_unscored},
                               {"cal_unjudged", cal_unjudged}});

    // ---- transform train confidences
    long train_unscored = 0;
    for (std::size_t i = train_begin; i < candidates.size(); ++i) {
        auto& cand = candidates[i];
        if (!cand.pred.raw_confidence) {
            ++train_unscored;
            continue;
        }
        cand.pred.calibrated_confidence = iso.transform(*cand.pred.raw_confidence);
    }
    log.event("transform", {{"samples", candidates.size() - train_begin},
                            {"unscored", train_unscored}});

    // ---- map calibrated confidences to expressions
    long ambiguous = 0;
    for (std::size_t i = train_begin; i < candidates.size(); ++i) {
        auto& cand = candidates[i];
        if (!cand.pred.calibrated_confidence) continue;
        double c = *cand.pred.calibrated_confidence;
        cand.bin_index = map.bin_of(c);
        Rng rng = keyed_rng(config.seed, "expr", cand.example->id,
                            static_cast<std::uint64_t>(cand.pred.sample_index));
        cand.expression = map.expression_for(c, rng.next());
        if (contains_expression(cand.pred.raw_answer, map)) ++ambiguous;
    }
    log.event("map_expressions", {{"ambiguous_answers", ambiguous}});

    // ---- drop accounting over train candidates, then augment survivors
    long dup_dropped = 0, filtered = 0, unjudged_filtered = 0, augment_failed = 0;
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<std::size_t> survivors;
    for (std::size_t i = train_begin; i < candidates.size(); ++i) {
        auto& cand = candidates[i];
        if (!cand.pred.calibrated_confidence) continue;  // counted as train_unscored
        if (!seen.emplace(cand.example->id, normalize_text(cand.pred.raw_answer)).second) {
            ++dup_dropped;
            continue;
        }
        if (config.filter_by_correctness) {
            if (!cand.pred.correct.has_value()) {
                ++unjudged_filtered;
                continue;
            }
            if (!*cand.pred.correct) {
                ++filtered;
                continue;
            }
        }
        survivors.push_back(i);
    }
    std::vector<std::size_t> augmented_ok;
    std::mutex augment_mutex;
    std::vector<char> failed(candidates.size(), 0);
    parallel_for_indexed(survivors.size(), backend.max_parallel(), [&](std::size_t si) {
        auto& cand = candidates[survivors[si]];
        try {
            cand.augmented = augment(cand.pred.raw_answer, *cand.expression, config.mode, map,
                                     &backend, &prompts, cand.example->question);
        } catch (const Error&) {
            failed[survivors[si]] = 1;
        }
    });
    for (std::size_t i : survivors) {
        if (failed[i])
            ++augment_failed;
        else
            augmented_ok.push_back(i);
    }
    log.event("augment", {{"mode", augment_mode_name(config.mode)},
                          {"augmented", augmented_ok.size()},
                          {"failed", augment_failed}});

    // ---- balance: cap each bin by seeded uniform sampling without replacement
    std::map<int, std::vector<std::size_t>> by_bin;
    for (std::size_t i : augmented_ok) by_bin[*candidates[i].bin_index].push_back(i);
    long over_cap = 0;
    std::vector<std::size_t> kept;
    json per_bin = json::array();
    for (auto& [bin, members] : by_bin) {
        std::size_t cap = static_cast<std::size_t>(config.max_per_bin);
        std::vector<std::size_t> chosen = members;
        if (members.size() > cap) {
            Rng rng = keyed_rng(config.seed, "balance", "", static_cast<std::uint64_t>(bin));
            for (std::size_t i = 0; i < cap; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.bounded(chosen.size() - i));
                std::swap(chosen[i], chosen[j]);
            }
            chosen.resize(cap);
            std::sort(chosen.begin(), chosen.end());
            over_cap += static_cast<long>(members.size() - cap);
        }
        per_bin.push_back(json{{"bin_index", bin},
                               {"candidates", members.size()},
                               {"kept", chosen.size()},
                               {"dropped_over_cap", members.size() - chosen.size()}});
        kept.insert(kept.end(), chosen.begin(), chosen.end());
    }
    std::sort(kept.begin(), kept.end());  // candidate order is (example_id, sample_index)

    CurationResult result;
    result.isotonic = iso;
    for (std::size_t i : kept) {
        const auto& cand = candidates[i];
        CuratedRecord rec;
        rec.example_id = cand.example->id;
        rec.question = cand.example->question;
        rec.augmented_answer = *cand.augmented;
        rec.expression = *cand.expression;
        rec.bin_index = *cand.bin_index;
        rec.mode = config.mode;
        result.records.push_back(std::move(rec));
    }

    long total_candidates = static_cast<long>(candidates.size() - train_begin);
    json counts{{"train_questions", train_examples.size()},
                {"calibration_questions", cal_examples.size()},
                {"calibration_samples", train_begin},
                {"calibration_unscored", cal_unscored},
                {"calibration_unjudged", cal_unjudged},
                {"candidates", total_candidates},
                {"kept", result.records.size()},
                {"dropped",
                 {{"unscored", train_unscored},
                  {"duplicate", dup_dropped},
                  {"filtered_incorrect", filtered},
                  {"unjudged_filtered", unjudged_filtered},
                  {"augment_failed", augment_failed},
                  {"over_cap", over_cap}}},
                {"ambiguous_answers", ambiguous}};
    result.manifest = json{{"config", config.to_json()},
                           {"counts", counts},
                           {"per_bin", per_bin},
                           {"isotonic", iso.to_json()},
                           {"training", emit_training_manifest(config)}};
    log.event("emit", {{"kept", result.records.size()}});
    return result;
}

}  // namespace uncal
