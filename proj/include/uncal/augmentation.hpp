#pragma once

#include <optional>
#include <string>

#include "uncal/backend.hpp"
#include "uncal/expression_map.hpp"
#include "uncal/prompts.hpp"
#include "uncal/records.hpp"

namespace uncal {

/// Combines a prediction with an expression. Prefixed and postfixed are the
/// fixed comma templates ("Certain, Paris" / "Paris, certain"); interleaved
/// asks the backend to weave the expression in and enforces that the result
/// contains it exactly once. Raises Error on an unusable interleaved output.
std::string augment(const std::string& prediction, const std::string& expression,
                    AugmentMode mode, const ExpressionMap& map,
                    ModelBackend* backend = nullptr, const PromptSet* prompts = nullptr,
                    const std::string& question = {});

struct Disentangled {
    std::string answer;
    std::string expression;  // canonical table entry
};

/// Rule-based inverse: the two comma templates first, then the sentence
/// scaffolds the interleaving prompt produces. nullopt if no table expression
/// is found.
std::optional<Disentangled> disentangle_rules(const std::string& augmented,
                                              const ExpressionMap& map);

/// Rules first, then the backend disentangling prompt. nullopt = unparseable.
std::optional<Disentangled> disentangle(const std::string& augmented, const ExpressionMap& map,
                                        ModelBackend* backend = nullptr,
                                        const PromptSet* prompts = nullptr);

/// True if the text contains any table expression (used to flag ambiguous
/// predictions at curation time).
bool contains_expression(const std::string& text, const ExpressionMap& map);

}  // namespace uncal
