#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace uncal {

struct ProbabilityBin {
    double lower = 0.0;
    double upper = 0.0;
    double representative = 0.0;  // (lower + upper) / 2
    std::vector<std::string> expressions;
};

/// The probability <-> linguistic-expression table. Bins are ordered
/// descending by lower bound (index 0 = "certain"). The published ranges leave
/// gaps; assignment uses lower-edge intervals so bin_of is total on [0,1]
/// while representatives keep the printed midpoints.
class ExpressionMap {
public:
    static ExpressionMap builtin();
    static ExpressionMap from_json(const nlohmann::json& j);

    std::size_t bin_count() const { return bins_.size(); }
    const std::vector<ProbabilityBin>& bins() const { return bins_; }
    const ProbabilityBin& bin(std::size_t index) const { return bins_.at(index); }

    /// Total on [0,1]; DomainError outside.
    int bin_of(double confidence) const;

    /// Uniform seeded draw from the bin's expressions.
    std::string expression_for(double confidence, std::uint64_t rng_seed) const;

    /// Midpoint of the bin owning the expression. Case-insensitive,
    /// punctuation-tolerant, alias-aware ("certainly" -> "certain").
    /// Unknown expression -> LookupError listing the valid entries.
    double probability_of(std::string_view expression) const;

    /// Canonical table entry for a raw phrase, or nullopt if unrecognized.
    std::optional<std::string> canonical(std::string_view phrase) const;

    /// Bin index of a canonical expression; LookupError if unknown.
    int bin_of_expression(std::string_view expression) const;

    /// All matchable phrases (canonical entries then aliases), longest first.
    /// Used by the rule-based disentangler.
    const std::vector<std::string>& matchable_phrases() const { return phrases_; }

private:
    void index_table();

    std::vector<ProbabilityBin> bins_;
    std::vector<double> edges_;                         // ascending assignment edges
    std::map<std::string, int> expr_to_bin_;            // normalized canonical -> bin
    std::map<std::string, std::string> alias_to_expr_;  // normalized alias -> canonical
    std::vector<std::string> phrases_;
};

}  // namespace uncal
