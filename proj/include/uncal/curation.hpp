#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uncal/backend.hpp"
#include "uncal/expression_map.hpp"
#include "uncal/isotonic.hpp"
#include "uncal/log.hpp"
#include "uncal/prompts.hpp"
#include "uncal/records.hpp"

namespace uncal {

struct CurationConfig {
    int samples_per_question = 4;
    double temperature = 1.0;
    AugmentMode mode = AugmentMode::postfixed;
    int max_per_bin = 1;
    bool filter_by_correctness = false;
    std::uint64_t seed = 0;

    static CurationConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// SFT hyperparameters recorded alongside the dataset; training itself runs
/// externally.
nlohmann::json emit_training_manifest(const CurationConfig& config);

struct CurationResult {
    std::vector<CuratedRecord> records;  // ordered by (example_id, sample_index)
    IsotonicModel isotonic;
    nlohmann::json manifest;
};

/// Runs the full curation pipeline: sample predictions for the calibration and
/// train splits, self-evaluate confidence on both, judge calibration
/// correctness, fit the isotonic recalibrator, transform train confidences,
/// map to expressions, augment, dedup, optionally filter, and cap every bin.
/// The manifest reconciles kept + dropped counts against the candidate total.
///
/// If checkpoint_path is set, scored predictions are persisted as stages
/// complete and reused on rerun when the config hash matches, so an
/// interrupted run resumes to identical output.
CurationResult curate(const std::vector<QAExample>& dataset, const CurationConfig& config,
                      ModelBackend& backend, const ExpressionMap& map, const PromptSet& prompts,
                      Logger& log,
                      const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

}  // namespace uncal
