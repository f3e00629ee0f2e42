#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uncal/backend.hpp"
#include "uncal/expression_map.hpp"

namespace uncal {

/// Truth table for the deterministic test backend. knowledge_level is the
/// probability a generation for that question is the canonical answer.
struct SimulatedWorld {
    struct Entry {
        std::string canonical_answer;
        double knowledge_level = 0.0;  // in [0,1]
    };
    std::map<std::string, Entry> entries;  // question_id -> entry
    std::uint64_t seed = 0;

    static SimulatedWorld load(const std::filesystem::path& path, std::uint64_t seed);
    void save(const std::filesystem::path& path) const;
};

/// Generates a synthetic world: ids q0000..., knowledge levels uniform in
/// [0,1]. Question texts embed "[qid:...]" so the backend can resolve rendered
/// prompts back to truth-table entries.
SimulatedWorld generate_world(int n, std::uint64_t seed);

std::string world_question_text(const std::string& question_id);

/// Extracts the last "[qid:...]" tag from a prompt, if any.
std::optional<std::string> extract_qid(const std::string& text);

/// Deterministic offline backend. Every draw is keyed by (world seed, request
/// identity), never by call order, so any interleaving yields the same run.
class SimulatedBackend : public ModelBackend {
public:
    explicit SimulatedBackend(SimulatedWorld world);

    std::vector<std::string> generate(const std::string& prompt, double temperature,
                                      int n) override;
    std::vector<double> choice_probability(const TokenChoiceQuery& query) override;
    Verdict judge_equivalence(const std::string& question, const std::string& gold,
                              const std::string& predicted) override;
    int max_parallel() const override { return 8; }

private:
    const SimulatedWorld::Entry& entry_for(const std::string& prompt) const;

    SimulatedWorld world_;
    ExpressionMap map_ = ExpressionMap::builtin();
};

}  // namespace uncal
