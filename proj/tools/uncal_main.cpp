#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uncal/augmentation.hpp"
#include "uncal/backend.hpp"
#include "uncal/curation.hpp"
#include "uncal/errors.hpp"
#include "uncal/evaluation.hpp"
#include "uncal/expression_map.hpp"
#include "uncal/isotonic.hpp"
#include "uncal/log.hpp"
#include "uncal/metrics.hpp"
#include "uncal/prompts.hpp"
#include "uncal/records.hpp"
#include "uncal/rng.hpp"
#include "uncal/simulated_backend.hpp"

namespace {

using nlohmann::json;
using namespace uncal;

constexpr const char* kToolVersion = "0.1.0";

std::string hex_hash(const json& config) {
    std::uint64_t h = hash_str(config.dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json make_meta(const json& effective_config, std::uint64_t seed) {
    return json{{"tool_version", kToolVersion},
                {"config_hash", hex_hash(effective_config)},
                {"seed", seed}};
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return json::parse(in);
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot write " + path);
    out << j.dump(2) << "\n";
}

ExpressionMap load_map(const std::string& override_path) {
    if (override_path.empty()) return ExpressionMap::builtin();
    std::ifstream in(override_path);
    if (!in) throw ConfigError("cannot open expression map " + override_path);
    return ExpressionMap::from_json(json::parse(in));
}

PromptSet load_prompts(const std::string& dir) {
    return dir.empty() ? PromptSet::builtin() : PromptSet::load(dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linguistic-uncertainty calibration toolkit"};
    app.require_subcommand(1);

    std::string config_path, prompts_dir, map_path;
    app.add_option("--config", config_path, "run.json configuration file");
    app.add_option("--prompts", prompts_dir, "prompt template directory override");
    app.add_option("--expression-map", map_path, "expression map JSON override");

    // split
    auto* split_cmd = app.add_subcommand("split", "assign dataset split tags");
    std::string split_in, split_out;
    SplitSpec spec;
    bool overwrite_tags = false;
    split_cmd->add_option("--in", split_in)->required();
    split_cmd->add_option("--out", split_out, "defaults to --in");
    split_cmd->add_option("--fewshot", spec.fewshot_count)->required();
    split_cmd->add_option("--cal", spec.calibration_count)->required();
    split_cmd->add_option("--test", spec.test_count);
    split_cmd->add_option("--seed", spec.seed);
    split_cmd->add_flag("--overwrite-tags", overwrite_tags);

    // simulate-world
    auto* world_cmd = app.add_subcommand("simulate-world", "generate a synthetic world");
    int world_n = 0;
    std::uint64_t world_seed = 0;
    std::string world_out, world_dataset;
    world_cmd->add_option("--n", world_n)->required();
    world_cmd->add_option("--seed", world_seed);
    world_cmd->add_option("--out", world_out)->required();
    world_cmd->add_option("--dataset", world_dataset, "also emit a QA dataset for the world");

    // curate
    auto* curate_cmd = app.add_subcommand("curate", "run the dataset curation pipeline");
    std::string curate_dataset, curate_out, curate_manifest;
    std::optional<std::uint64_t> cur_seed;
    std::optional<int> cur_max_per_bin, cur_samples;
    std::optional<double> cur_temperature;
    std::optional<std::string> cur_mode;
    bool cur_filter = false;
    curate_cmd->add_option("--dataset", curate_dataset)->required();
    curate_cmd->add_option("--out", curate_out)->required();
    curate_cmd->add_option("--manifest", curate_manifest)->required();
    curate_cmd->add_option("--seed", cur_seed);
    curate_cmd->add_option("--max-per-bin", cur_max_per_bin);
    curate_cmd->add_option("--samples", cur_samples);
    curate_cmd->add_option("--temperature", cur_temperature);
    curate_cmd->add_option("--mode", cur_mode, "prefixed|postfixed|interleaved");
    curate_cmd->add_flag("--filter-by-correctness", cur_filter);

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "fit an isotonic model from scored pairs");
    std::string cal_pairs, cal_out;
    cal_cmd->add_option("--pairs", cal_pairs)->required();
    cal_cmd->add_option("--out", cal_out)->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score uncertainty-augmented predictions");
    std::string eval_test, eval_preds, eval_report, eval_ledger, eval_iso, eval_split = "test";
    bool eval_self = false;
    std::optional<int> eval_samples;
    std::optional<double> eval_temperature;
    eval_cmd->add_option("--test", eval_test)->required();
    eval_cmd->add_option("--predictions", eval_preds);
    eval_cmd->add_option("--out", eval_report)->required();
    eval_cmd->add_option("--ledger", eval_ledger);
    eval_cmd->add_flag("--self-eval", eval_self, "raw self-evaluation calibration report");
    eval_cmd->add_option("--isotonic", eval_iso, "isotonic model for the post-processed row");
    eval_cmd->add_option("--split", eval_split, "split to evaluate (self-eval mode)");
    eval_cmd->add_option("--samples", eval_samples);
    eval_cmd->add_option("--temperature", eval_temperature);

    // chart
    auto* chart_cmd = app.add_subcommand("chart", "emit calibration chart CSV from a report");
    std::string chart_report, chart_csv;
    chart_cmd->add_option("--report", chart_report)->required();
    chart_cmd->add_option("--csv", chart_csv)->required();

    CLI11_PARSE(app, argc, argv);

    Logger log(std::cerr);
    try {
        json file_cfg = load_config_file(config_path);
        ExpressionMap map = load_map(map_path);
        PromptSet prompts = load_prompts(prompts_dir);

        if (split_cmd->parsed()) {
            if (split_out.empty()) split_out = split_in;
            auto examples = read_dataset(split_in);
            auto tagged = split_dataset(std::move(examples), spec, overwrite_tags);
            json cfg{{"command", "split"}, {"fewshot", spec.fewshot_count},
                     {"cal", spec.calibration_count}, {"test", spec.test_count},
                     {"seed", spec.seed}};
            json meta = make_meta(cfg, spec.seed);
            jsonl::write(split_out, tagged, &meta);
            log.event("split_done", {{"out", split_out}, {"n", tagged.size()}});
            return 0;
        }

        if (world_cmd->parsed()) {
            SimulatedWorld world = generate_world(world_n, world_seed);
            world.save(world_out);
            if (!world_dataset.empty()) {
                std::vector<QAExample> examples;
                for (const auto& [id, e] : world.entries)
                    examples.push_back(QAExample{id, world_question_text(id),
                                                 {e.canonical_answer}, Split::unassigned, {}});
                json cfg{{"command", "simulate-world"}, {"n", world_n}, {"seed", world_seed}};
                json meta = make_meta(cfg, world_seed);
                jsonl::write(world_dataset, examples, &meta);
            }
            log.event("world_done", {{"out", world_out}, {"n", world_n}});
            return 0;
        }

        if (cal_cmd->parsed()) {
            auto scored = jsonl::read<ScoredPrediction>(cal_pairs);
            std::vector<IsoPair> pairs;
            for (const auto& p : scored)
                if (p.raw_confidence && p.correct.has_value())
                    pairs.push_back({*p.raw_confidence, *p.correct ? 1.0 : 0.0, 1.0});
            IsotonicModel iso = fit_isotonic(pairs);
            json out = iso.to_json();
            out["_meta"] = make_meta(json{{"command", "calibrate"}, {"pairs", cal_pairs}}, 0);
            write_json_file(cal_out, out);
            log.event("calibrate_done", {{"pairs", pairs.size()},
                                         {"blocks", iso.block_x.size()}});
            return 0;
        }

        if (chart_cmd->parsed()) {
            std::ifstream in(chart_report);
            if (!in) throw ConfigError("cannot open report " + chart_report);
            json rep = json::parse(in);
            CalibrationReport report;
            report.n = rep.at("n").get<long>();
            report.ece = rep.at("ece").get<double>();
            report.brier = rep.at("brier").get<double>();
            for (const auto& b : rep.at("bins")) {
                BinStat stat;
                stat.bin_index = b.at("bin_index").get<int>();
                stat.count = b.at("count").get<long>();
                if (!b.at("accuracy").is_null()) stat.accuracy = b.at("accuracy").get<double>();
                if (!b.at("mean_confidence").is_null())
                    stat.mean_confidence = b.at("mean_confidence").get<double>();
                if (!b.at("accuracy_variance").is_null())
                    stat.accuracy_variance = b.at("accuracy_variance").get<double>();
                report.bins.push_back(stat);
            }
            std::ofstream csv(chart_csv, std::ios::trunc);
            if (!csv) throw ParseError("cannot write " + chart_csv);
            csv << report_csv(report, map);
            log.event("chart_done", {{"csv", chart_csv}});
            return 0;
        }

        // remaining subcommands need a backend
        BackendConfig backend_cfg = file_cfg.contains("backend")
                                        ? BackendConfig::from_json(file_cfg.at("backend"))
                                        : BackendConfig::from_json(json::object());

        if (curate_cmd->parsed()) {
            json cur_json = file_cfg.value("curation", json::object());
            CurationConfig cfg = CurationConfig::from_json(cur_json);
            if (cur_seed) cfg.seed = *cur_seed;
            if (cur_max_per_bin) cfg.max_per_bin = *cur_max_per_bin;
            if (cur_samples) cfg.samples_per_question = *cur_samples;
            if (cur_temperature) cfg.temperature = *cur_temperature;
            if (cur_mode) cfg.mode = augment_mode_from_name(*cur_mode);
            if (cur_filter) cfg.filter_by_correctness = true;

            auto dataset = read_dataset(curate_dataset);
            auto backend = make_backend(backend_cfg);
            auto ckpt = std::filesystem::path(curate_out).parent_path() / "curate.ckpt.jsonl";
            CurationResult result =
                curate(dataset, cfg, *backend, map, prompts, log, ckpt);

            json effective{{"command", "curate"}, {"backend", backend_cfg.to_json()},
                           {"curation", cfg.to_json()}};
            json meta = make_meta(effective, cfg.seed);
            jsonl::write(curate_out, result.records, &meta);
            result.manifest["_meta"] = meta;
            write_json_file(curate_manifest, result.manifest);
            return 0;
        }

        if (eval_cmd->parsed()) {
            auto dataset = read_dataset(eval_test);
            auto backend = make_backend(backend_cfg);
            json eval_json = file_cfg.value("evaluation", json::object());
            double temperature =
                eval_temperature.value_or(eval_json.value("temperature", 1.0));
            int samples = eval_samples.value_or(eval_json.value("samples_per_question", 1));
            json effective{{"command", "evaluate"}, {"backend", backend_cfg.to_json()},
                           {"temperature", temperature}, {"samples", samples}};
            json meta = make_meta(effective, backend_cfg.seed);

            if (eval_self) {
                std::optional<IsotonicModel> iso;
                if (!eval_iso.empty()) {
                    std::ifstream in(eval_iso);
                    if (!in) throw ConfigError("cannot open isotonic model " + eval_iso);
                    iso = IsotonicModel::from_json(json::parse(in));
                }
                SelfEvalReport rep = self_eval_report(
                    dataset, split_from_name(eval_split), *backend, map, prompts, temperature,
                    samples, iso ? &*iso : nullptr);
                json out{{"_meta", meta},
                         {"raw", rep.raw.to_json()},
                         {"unscored", rep.unscored},
                         {"unjudged", rep.unjudged}};
                if (rep.post_isotonic) out["post_isotonic"] = rep.post_isotonic->to_json();
                write_json_file(eval_report, out);
                return 0;
            }

            if (eval_preds.empty())
                throw ConfigError("evaluate needs --predictions (or --self-eval)");
            auto predictions = jsonl::read<ScoredPrediction>(eval_preds);
            EvaluationResult result =
                evaluate(dataset, predictions, map, *backend, prompts, log);
            json out = result.report_json();
            out["_meta"] = meta;
            write_json_file(eval_report, out);
            if (!eval_ledger.empty()) jsonl::write(eval_ledger, result.ledger, &meta);
            return result.flagged_failing ? 2 : 0;
        }

        throw ConfigError("no subcommand executed");
    } catch (const BackendError& e) {
        log.event("error", {{"kind", "backend"}, {"message", e.what()}});
        return 2;
    } catch (const Error& e) {
        log.event("error", {{"kind", "validation"}, {"message", e.what()}});
        return 1;
    } catch (const std::exception& e) {
        log.event("error", {{"kind", "runtime"}, {"message", e.what()}});
        return 2;
    }
}
