#include "uncal/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uncal/errors.hpp"

namespace uncal {

namespace {

constexpr const char* kSelfEvalFile = R"PROMPT(You are a highly knowledgeable assistant who is always factual and careful. For a {QUESTION} check if the {PROPOSED_ANSWER} is True
or False.

{FEWSHOT}{QUESTION}: {THE_QUESTION}
{PROPOSED_ANSWER}: {THE_ANSWER}
Is the Proposed Answer:
a) True
b) False
The proposed Answer is:
---fewshot---
{QUESTION}: {THE_QUESTION}
{PROPOSED_ANSWER}: {THE_ANSWER}
Is the Proposed Answer:
a) True
b) False
The proposed Answer is: {LABEL}

)PROMPT";

constexpr const char* kAnswerFile = R"PROMPT(Answer the following question concisely, giving only the answer.

{QUESTION}: {THE_QUESTION}
{ANSWER}:
)PROMPT";

constexpr const char* kInterleaveFile = R"PROMPT(You are a powerful agent that understands probabilities and language. Given a {QUESTION}, {ANSWER} and {PROBABILITY_EXPRESSION}, you
modify the {ANSWER} using the appropriate probability expression. Do not modify the core content of the {ANSWER}, and the only
change made is to include the {PROBABILITY_EXPRESSION} to the {ANSWER} to produce the {MODIFIED_ANSWER}.

Here are a few examples:

Example 1:
{QUESTION}: Which English author, who died in 1998, published Katie Hannigan in 1950 and The Bill Bailey Trilogy between 1986 and
1997?
{ANSWER}: richard adamson
{PROBABILITY_EXPRESSION}: little chance
{MODIFIED_ANSWER}: There is little chance that the author is Richard Adamson.

Example 2:
{QUESTION}: What chemical element has the symbol S?
{ANSWER}: sulphur
{PROBABILITY_EXPRESSION}: very good chance
{MODIFIED_ANSWER}: There is a very good chance that it is sulphur.

Example 3:
{QUESTION}: What is secreted by the lachrymal glands?
{ANSWER}: tears
{PROBABILITY_EXPRESSION}: certain
{MODIFIED_ANSWER}: It is certainly tears.

Example 4:
{QUESTION}: How many days is the gestation period of a domestic dog (5 days either way)?
{ANSWER}: 58-63
{PROBABILITY_EXPRESSION}: chances are about even
{MODIFIED_ANSWER}: Chances are about even that it is 58-63 days.

Example 5:
{QUESTION}: Which record label signed the Rolling Stones in 1991?
{ANSWER}: umg
{PROBABILITY_EXPRESSION}: i doubt
{MODIFIED_ANSWER}: I doubt that it is umg.

Example 6:
{QUESTION}: What is the capital of India?
{ANSWER}: Delhi.
{PROBABILITY_EXPRESSION}: impossible
{MODIFIED_ANSWER}: It is impossible that it is Delhi.

Example 7:

{QUESTION}: {THE_QUESTION}
{ANSWER}: {THE_ANSWER}
{PROBABILITY_EXPRESSION}: {THE_PROBABILITY_EXPRESSION}
{MODIFIED_ANSWER}:
)PROMPT";

constexpr const char* kDisentangleFile = R"PROMPT(You are presented with a statement, which may contain a notion of uncertainty expressed linguistically within it. Your task is to
extract the {UNCERTAINTY_PHRASE} separately, and remove the uncertainty component from the answer.

Here is the list of valid uncertainty expressions.

[certain, almost certain, highly likely, very good chance, likely, i believe, probably, probable, chances are about even,
i doubt, unlikely, little chance, chances are slight, improbable, highly unlikely, impossible].

List the Answer removed of uncertainty in the {ANSWER_WITHOUT_UNCERTAINTY} field. List the uncertainty expression used in the
Uncertainty field.

{ANSWER}: X was certainly not born in 1985.
{ANSWER_WITHOUT_UNCERTAINTY}: X was not born in 1985.
{UNCERTAINTY_PHRASE}: certainly

{ANSWER}: The capital of France almost certainly might be paris.
{ANSWER_WITHOUT_UNCERTAINTY}: The capital of France is Paris.
{UNCERTAINTY_PHRASE}: almost certainly

{ANSWER}: There is little chance but the fact is correct.
{ANSWER_WITHOUT_UNCERTAINTY}: The fact is correct.
{UNCERTAINTY_PHRASE}: little chance

{ANSWER}: It is about even that the coin will be heads.
{ANSWER_WITHOUT_UNCERTAINTY}: The coin will be heads.
{UNCERTAINTY_PHRASE}: about even

{ANSWER}: It is impossible that the Sun rises in the West.
{ANSWER_WITHOUT_UNCERTAINTY}: The Sun rises in the West.
{UNCERTAINTY_PHRASE}: impossible

{ANSWER}: It is highly unlikely that the coin will be heads.
{ANSWER_WITHOUT_UNCERTAINTY}: The coin will be heads.
{UNCERTAINTY_PHRASE}: highly unlikely

{ANSWER}: There is a very good chance that tomato might not be a vegetable.
{ANSWER_WITHOUT_UNCERTAINTY}: Tomato is not a vegetable.
{UNCERTAINTY_PHRASE}: very good chance

Here is the {ANSWER} which needs to be separated into {ANSWER_WITHOUT_UNCERTAINTY}, and {UNCERTAINTY_PHRASE}.

{ANSWER}: {THE_ANSWER}
)PROMPT";

constexpr const char* kLmeFile = R"PROMPT(Your task is to determine if two answers to a question are semantically equivalent. Two answers are semantically equivalent if their
answer to the question is the same, even if they are rephrases of each other.

Even if one contains more information than the other, as long as their answer to the question is the same, the answers are considered
semantically equivalent.

For example, for the question `Tell me a number`, the answers `five` and `6` are not semantically equivalent as they are different
numbers. However, the answers `5` and `A number is five` or `five` are semantically equivalent, since they convey the same thing.

For a question `Tell me the capital of France`, `Its Venice` and `Venice` are semantically equivalent, as they give the same answer.
The Answers `Paris` and `Venice` are not semantically equivalent. For questions asking factual information, if one answer responds
with information disagreeing with the other, they will not be semantically equivalent.

Another example of not semantically equivalent answers would be `Miles` and `Kilometers` for the question `Tell me an unit of
distance`, as these two units are not the same.

Here is the question, and Answer A and Answer B to be compared.

Respond with `YES` if they are semantically equivalent, `NO` otherwise.

Question: {THE_QUESTION}
Answer A: {GOLD_ANSWER}
Answer B: {PRED_ANSWER}
Semantically equivalent:
)PROMPT";

PromptTemplate parse_template(std::string name, std::string file_text) {
    static const std::string separator = "\n---fewshot---\n";
    PromptTemplate t;
    t.name = std::move(name);
    auto pos = file_text.find(separator);
    if (pos == std::string::npos) {
        t.body = std::move(file_text);
    } else {
        t.body = file_text.substr(0, pos + 1);  // keep the body's final newline
        t.fewshot_block = file_text.substr(pos + separator.size());
    }
    return t;
}

}  // namespace

std::string render_placeholders(std::string_view body,
                                const std::map<std::string, std::string>& values) {
    std::string out(body);
    for (const auto& [key, value] : values) {
        std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

PromptSet PromptSet::builtin() {
    PromptSet p;
    p.templates_["self_eval"] = parse_template("self_eval", kSelfEvalFile);
    p.templates_["answer"] = parse_template("answer", kAnswerFile);
    p.templates_["interleave"] = parse_template("interleave", kInterleaveFile);
    p.templates_["disentangle"] = parse_template("disentangle", kDisentangleFile);
    p.templates_["lme"] = parse_template("lme", kLmeFile);
    return p;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    PromptSet p = builtin();
    for (const auto& name : {"self_eval", "answer", "interleave", "disentangle", "lme"}) {
        auto path = dir / (std::string(name) + ".txt");
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open prompt template " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        p.templates_[name] = parse_template(name, buf.str());
    }
    return p;
}

const PromptTemplate& PromptSet::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw LookupError("no prompt template named '" + std::string(name) + "'");
    return it->second;
}

std::string PromptSet::render_answer(const std::string& question) const {
    return render_placeholders(get("answer").body, {{"THE_QUESTION", question}});
}

std::string PromptSet::render_interleave(const std::string& question, const std::string& answer,
                                         const std::string& expression) const {
    return render_placeholders(get("interleave").body,
                               {{"THE_QUESTION", question},
                                {"THE_ANSWER", answer},
                                {"THE_PROBABILITY_EXPRESSION", expression}});
}

std::string PromptSet::render_disentangle(const std::string& augmented) const {
    return render_placeholders(get("disentangle").body, {{"THE_ANSWER", augmented}});
}

std::string PromptSet::render_lme(const std::string& question, const std::string& gold,
                                  const std::string& predicted) const {
    return render_placeholders(get("lme").body, {{"THE_QUESTION", question},
                                                 {"GOLD_ANSWER", gold},
                                                 {"PRED_ANSWER", predicted}});
}

std::string render_self_eval(const PromptSet& prompts, std::vector<FewshotExemplar> fewshot,
                             const std::string& question, const std::string& proposed_answer) {
    const PromptTemplate& t = prompts.get("self_eval");
    for (const auto& ex : fewshot) {
        if (ex.example.split != Split::fewshot)
            throw ConfigError("self-eval exemplar '" + ex.example.id +
                              "' is not from the fewshot split");
        if (ex.proposed_answer.empty())
            throw ConfigError("self-eval exemplar '" + ex.example.id + "' lacks a prediction");
    }
    std::sort(fewshot.begin(), fewshot.end(),
              [](const FewshotExemplar& a, const FewshotExemplar& b) {
                  return a.example.id < b.example.id;
              });
    std::string blocks;
    if (t.fewshot_block) {
        for (const auto& ex : fewshot)
            blocks += render_placeholders(*t.fewshot_block,
                                          {{"THE_QUESTION", ex.example.question},
                                           {"THE_ANSWER", ex.proposed_answer},
                                           {"LABEL", ex.label ? "True" : "False"}});
    }
    return render_placeholders(t.body, {{"FEWSHOT", blocks},
                                        {"THE_QUESTION", question},
                                        {"THE_ANSWER", proposed_answer}});
}

}  // namespace uncal
