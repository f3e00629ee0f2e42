#include "uncal/elicitation.hpp"

#include <cmath>

namespace uncal {

std::optional<double> self_eval_confidence(const PromptSet& prompts,
                                           const std::vector<FewshotExemplar>& fewshot,
                                           const std::string& question,
                                           const std::string& prediction,
                                           ModelBackend& backend) {
    TokenChoiceQuery query;
    query.prompt = render_self_eval(prompts, fewshot, question, prediction);
    query.candidates = {"True", "False"};
    std::vector<double> probs;
    try {
        probs = backend.choice_probability(query);
    } catch (const BackendError&) {
        return std::nullopt;
    }
    double p_true = probs.at(0);
    if (std::isnan(p_true) || p_true < 0.0 || p_true > 1.0) return std::nullopt;
    return p_true;
}

std::vector<FewshotExemplar> fewshot_exemplars(const std::vector<QAExample>& examples) {
    std::vector<FewshotExemplar> out;
    for (const auto& e : examples) {
        if (e.split != Split::fewshot) continue;
        out.push_back(FewshotExemplar{e, e.gold_answers.front(), true});
    }
    return out;
}

}  // namespace uncal
