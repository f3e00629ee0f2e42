#pragma once

#include <string>
#include <vector>

#include "uncal/backend.hpp"
#include "uncal/prompts.hpp"

namespace uncal {

/// Chat/completions-style HTTP client. Expects an endpoint accepting
/// {model, messages, temperature, n, ...} and, for choice probabilities,
/// per-token log-probabilities of the first generated position
/// (logprobs/top_logprobs as in the common chat-completions schema).
class HttpBackend : public ModelBackend {
public:
    explicit HttpBackend(BackendConfig config);

    std::vector<std::string> generate(const std::string& prompt, double temperature,
                                      int n) override;
    std::vector<double> choice_probability(const TokenChoiceQuery& query) override;
    Verdict judge_equivalence(const std::string& question, const std::string& gold,
                              const std::string& predicted) override;
    int max_parallel() const override { return config_.max_parallel; }

private:
    nlohmann::json post(const nlohmann::json& body);

    BackendConfig config_;
    PromptSet prompts_ = PromptSet::builtin();
    std::string host_;  // scheme://host:port
    std::string path_;
    std::string api_key_;
};

}  // namespace uncal
