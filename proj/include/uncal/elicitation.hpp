#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uncal/backend.hpp"
#include "uncal/prompts.hpp"

namespace uncal {

/// Self-evaluation confidence: renders the True/False prompt and returns
/// P(True) / (P(True) + P(False)). nullopt means the record is unscored
/// (backend failure or zero probability mass); callers count these, never
/// substitute a default.
std::optional<double> self_eval_confidence(const PromptSet& prompts,
                                           const std::vector<FewshotExemplar>& fewshot,
                                           const std::string& question,
                                           const std::string& prediction,
                                           ModelBackend& backend);

/// Builds exemplars from the fewshot split: gold answer proposed, labeled True.
std::vector<FewshotExemplar> fewshot_exemplars(const std::vector<QAExample>& examples);

}  // namespace uncal
