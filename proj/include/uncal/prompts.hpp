#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uncal/records.hpp"

namespace uncal {

struct PromptTemplate {
    std::string name;
    std::string body;                         // placeholders like {THE_QUESTION}
    std::optional<std::string> fewshot_block;  // repeated per exemplar into {FEWSHOT}
};

std::string render_placeholders(std::string_view body,
                                const std::map<std::string, std::string>& values);

/// The template assets: self_eval, interleave, disentangle, lme, plus the
/// plain answer-generation prompt. Built-in bodies match the shipped
/// prompts/*.txt files; a directory override replaces individual templates.
class PromptSet {
public:
    static PromptSet builtin();
    static PromptSet load(const std::filesystem::path& dir);  // builtin + overrides

    const PromptTemplate& get(std::string_view name) const;

    std::string render_answer(const std::string& question) const;
    std::string render_interleave(const std::string& question, const std::string& answer,
                                  const std::string& expression) const;
    std::string render_disentangle(const std::string& augmented) const;
    std::string render_lme(const std::string& question, const std::string& gold,
                           const std::string& predicted) const;

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

/// A few-shot exemplar for the self-evaluation prompt: a question from the
/// fewshot split, a proposed answer, and its True/False label.
struct FewshotExemplar {
    QAExample example;
    std::string proposed_answer;
    bool label = true;
};

/// Deterministic render: header, exemplar blocks in ascending id order, then
/// the query block ending at "The proposed Answer is: ". Exemplars must come
/// from the fewshot split.
std::string render_self_eval(const PromptSet& prompts, std::vector<FewshotExemplar> fewshot,
                             const std::string& question, const std::string& proposed_answer);

}  // namespace uncal
