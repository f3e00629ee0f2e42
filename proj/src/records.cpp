#include "uncal/records.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "uncal/errors.hpp"
#include "uncal/rng.hpp"

namespace uncal {

using nlohmann::json;

std::string split_name(Split s) {
    switch (s) {
        case Split::fewshot: return "fewshot";
        case Split::calibration: return "calibration";
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::unassigned: break;
    }
    return "unassigned";
}

Split split_from_name(const std::string& name) {
    if (name == "fewshot") return Split::fewshot;
    if (name == "calibration") return Split::calibration;
    if (name == "train") return Split::train;
    if (name == "test") return Split::test;
    throw ParseError("unknown split tag: '" + name + "'");
}

std::string augment_mode_name(AugmentMode m) {
    switch (m) {
        case AugmentMode::prefixed: return "prefixed";
        case AugmentMode::postfixed: return "postfixed";
        case AugmentMode::interleaved: return "interleaved";
    }
    return "postfixed";
}

AugmentMode augment_mode_from_name(const std::string& name) {
    if (name == "prefixed") return AugmentMode::prefixed;
    if (name == "postfixed") return AugmentMode::postfixed;
    if (name == "interleaved") return AugmentMode::interleaved;
    throw ParseError("unknown augmentation mode: '" + name + "'");
}

namespace {

// Split known fields off, keep the rest for round-tripping.
json take_extra(json j, std::initializer_list<const char*> known) {
    for (const char* k : known) j.erase(k);
    return j;
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v.has_value())
        j[key] = *v;
    else
        j[key] = nullptr;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

void check_unit_interval(const std::optional<double>& v, const char* what) {
    if (v && (*v < 0.0 || *v > 1.0))
        throw ParseError(std::string(what) + " outside [0,1]");
}

}  // namespace

void to_json(json& j, const QAExample& r) {
    j = r.extra.is_object() ? r.extra : json::object();
    j["id"] = r.id;
    j["question"] = r.question;
    j["gold_answers"] = r.gold_answers;
    if (r.split == Split::unassigned)
        j.erase("split");
    else
        j["split"] = split_name(r.split);
}

void from_json(const json& j, QAExample& r) {
    r.id = j.at("id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    if (r.gold_answers.empty()) throw ParseError("gold_answers empty for id '" + r.id + "'");
    r.split = j.contains("split") && !j.at("split").is_null()
                  ? split_from_name(j.at("split").get<std::string>())
                  : Split::unassigned;
    r.extra = take_extra(j, {"id", "question", "gold_answers", "split"});
}

void to_json(json& j, const ScoredPrediction& r) {
    j = r.extra.is_object() ? r.extra : json::object();
    j["example_id"] = r.example_id;
    j["sample_index"] = r.sample_index;
    j["raw_answer"] = r.raw_answer;
    put_optional(j, "raw_confidence", r.raw_confidence);
    put_optional(j, "calibrated_confidence", r.calibrated_confidence);
    put_optional(j, "correct", r.correct);
}

void from_json(const json& j, ScoredPrediction& r) {
    r.example_id = j.at("example_id").get<std::string>();
    r.sample_index = j.at("sample_index").get<int>();
    if (r.sample_index < 0) throw ParseError("negative sample_index");
    r.raw_answer = j.at("raw_answer").get<std::string>();
    r.raw_confidence = get_optional<double>(j, "raw_confidence");
    r.calibrated_confidence = get_optional<double>(j, "calibrated_confidence");
    check_unit_interval(r.raw_confidence, "raw_confidence");
    check_unit_interval(r.calibrated_confidence, "calibrated_confidence");
    r.correct = get_optional<bool>(j, "correct");
    r.extra = take_extra(j, {"example_id", "sample_index", "raw_answer", "raw_confidence",
                             "calibrated_confidence", "correct"});
}

void to_json(json& j, const CuratedRecord& r) {
    j = r.extra.is_object() ? r.extra : json::object();
    j["example_id"] = r.example_id;
    j["question"] = r.question;
    j["augmented_answer"] = r.augmented_answer;
    j["expression"] = r.expression;
    j["bin_index"] = r.bin_index;
    j["mode"] = augment_mode_name(r.mode);
}

void from_json(const json& j, CuratedRecord& r) {
    r.example_id = j.at("example_id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.augmented_answer = j.at("augmented_answer").get<std::string>();
    r.expression = j.at("expression").get<std::string>();
    r.bin_index = j.at("bin_index").get<int>();
    r.mode = augment_mode_from_name(j.at("mode").get<std::string>());
    r.extra = take_extra(
        j, {"example_id", "question", "augmented_answer", "expression", "bin_index", "mode"});
}

std::vector<QAExample> split_dataset(std::vector<QAExample> examples, const SplitSpec& spec,
                                     bool overwrite_tags) {
    if (spec.fewshot_count < 1 || spec.calibration_count < 1 || spec.test_count < 0)
        throw ConfigError("split spec requires fewshot >= 1, calibration >= 1, test >= 0");

    const std::size_t need = static_cast<std::size_t>(spec.fewshot_count) +
                             static_cast<std::size_t>(spec.calibration_count) +
                             static_cast<std::size_t>(spec.test_count);
    if (need > examples.size())
        throw ConfigError("dataset too small: need " + std::to_string(need) + " examples, have " +
                          std::to_string(examples.size()) + " (short by " +
                          std::to_string(need - examples.size()) + ")");

    if (!overwrite_tags) {
        for (const auto& e : examples)
            if (e.split != Split::unassigned)
                throw ConfigError("example '" + e.id +
                                  "' already carries a split tag; pass the overwrite flag");
    }

    std::vector<std::string> ids;
    ids.reserve(examples.size());
    for (const auto& e : examples) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());

    // Fisher-Yates with the project RNG so the permutation is stable across
    // standard libraries.
    Rng rng = keyed_rng(spec.seed, "split");
    for (std::size_t i = ids.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(ids[i - 1], ids[j]);
    }

    std::map<std::string, Split> assignment;
    std::size_t pos = 0;
    for (int k = 0; k < spec.fewshot_count; ++k) assignment[ids[pos++]] = Split::fewshot;
    for (int k = 0; k < spec.calibration_count; ++k) assignment[ids[pos++]] = Split::calibration;
    for (int k = 0; k < spec.test_count; ++k) assignment[ids[pos++]] = Split::test;
    while (pos < ids.size()) assignment[ids[pos++]] = Split::train;

    for (auto& e : examples) e.split = assignment.at(e.id);
    return examples;
}

namespace jsonl {

std::vector<json> read_objects(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!obj.is_object())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": not a JSON object");
        if (obj.contains("_meta")) continue;
        out.push_back(std::move(obj));
    }
    return out;
}

void write_objects(const std::filesystem::path& path, const std::vector<json>& objects,
                   const json* meta) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot write " + path.string());
    if (meta) out << json{{"_meta", *meta}}.dump() << "\n";
    for (const auto& obj : objects) out << obj.dump() << "\n";
}

}  // namespace jsonl

std::vector<QAExample> read_dataset(const std::filesystem::path& path) {
    auto examples = jsonl::read<QAExample>(path);
    std::set<std::string> seen;
    for (const auto& e : examples)
        if (!seen.insert(e.id).second)
            throw ParseError("duplicate id '" + e.id + "' in " + path.string());
    return examples;
}

}  // namespace uncal
