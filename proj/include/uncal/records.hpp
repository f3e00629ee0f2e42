#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace uncal {

enum class Split { unassigned, fewshot, calibration, train, test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

/// One question with its gold answers; the unit every pipeline stage consumes.
struct QAExample {
    std::string id;
    std::string question;
    std::vector<std::string> gold_answers;  // length >= 1
    Split split = Split::unassigned;

    nlohmann::json extra;  // unknown JSONL fields, preserved on round-trip
};

/// One model sample for a question, progressively filled in by the pipeline.
/// Absent confidence/correctness are nulls on disk, never 0.0.
struct ScoredPrediction {
    std::string example_id;
    int sample_index = 0;
    std::string raw_answer;
    std::optional<double> raw_confidence;
    std::optional<double> calibrated_confidence;
    std::optional<bool> correct;

    nlohmann::json extra;
};

enum class AugmentMode { prefixed, postfixed, interleaved };

std::string augment_mode_name(AugmentMode m);
AugmentMode augment_mode_from_name(const std::string& name);

/// One uncertainty-augmented training record.
struct CuratedRecord {
    std::string example_id;
    std::string question;
    std::string augmented_answer;
    std::string expression;
    int bin_index = 0;
    AugmentMode mode = AugmentMode::postfixed;

    nlohmann::json extra;
};

struct SplitSpec {
    int fewshot_count = 1;
    int calibration_count = 1;
    int test_count = 0;
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const QAExample& r);
void from_json(const nlohmann::json& j, QAExample& r);
void to_json(nlohmann::json& j, const ScoredPrediction& r);
void from_json(const nlohmann::json& j, ScoredPrediction& r);
void to_json(nlohmann::json& j, const CuratedRecord& r);
void from_json(const nlohmann::json& j, CuratedRecord& r);

/// Assigns split tags: seeded shuffle of ids sorted lexicographically, then
/// prefix-partition in order fewshot, calibration, test; remainder is train.
/// Deterministic in (seed, id set); independent of input order.
std::vector<QAExample> split_dataset(std::vector<QAExample> examples, const SplitSpec& spec,
                                     bool overwrite_tags = false);

namespace jsonl {

/// Reads one JSON object per line. Objects carrying a "_meta" key are artifact
/// headers and are skipped. Malformed lines raise ParseError with the 1-based
/// line number.
std::vector<nlohmann::json> read_objects(const std::filesystem::path& path);

void write_objects(const std::filesystem::path& path, const std::vector<nlohmann::json>& objects,
                   const nlohmann::json* meta = nullptr);

template <typename T>
std::vector<T> read(const std::filesystem::path& path) {
    std::vector<T> out;
    for (const auto& obj : read_objects(path)) out.push_back(obj.template get<T>());
    return out;
}

template <typename T>
void write(const std::filesystem::path& path, const std::vector<T>& records,
           const nlohmann::json* meta = nullptr) {
    std::vector<nlohmann::json> objs;
    objs.reserve(records.size());
    for (const auto& r : records) objs.push_back(nlohmann::json(r));
    write_objects(path, objs, meta);
}

}  // namespace jsonl

/// read<QAExample> plus id-uniqueness check (duplicate id -> ParseError).
std::vector<QAExample> read_dataset(const std::filesystem::path& path);

}  // namespace uncal
