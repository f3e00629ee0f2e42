#include "uncal/augmentation.hpp"

#include <cctype>
#include <regex>

#include "uncal/text.hpp"

namespace uncal {

namespace {

std::string regex_escape(const std::string& s) {
    static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
    return std::regex_replace(s, special, R"(\$&)");
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) s.pop_back();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

// counts case-insensitive word-bounded occurrences of phrase
int count_occurrences(const std::string& text, const std::string& phrase) {
    std::string hay = to_lower(text);
    std::string needle = to_lower(phrase);
    int count = 0;
    std::size_t pos = 0;
    auto word_char = [](unsigned char c) { return std::isalnum(c) != 0; };
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !word_char(static_cast<unsigned char>(hay[pos - 1]));
        std::size_t end = pos + needle.size();
        bool right_ok = end >= hay.size() || !word_char(static_cast<unsigned char>(hay[end]));
        if (left_ok && right_ok) ++count;
        pos += 1;
    }
    return count;
}

}  // namespace

bool contains_expression(const std::string& text, const ExpressionMap& map) {
    for (const auto& phrase : map.matchable_phrases())
        if (count_occurrences(text, phrase) > 0) return true;
    return false;
}

std::string augment(const std::string& prediction, const std::string& expression,
                    AugmentMode mode, const ExpressionMap& map, ModelBackend* backend,
                    const PromptSet* prompts, const std::string& question) {
    auto canon = map.canonical(expression);
    if (!canon) throw LookupError("augment: '" + expression + "' is not a table expression");

    switch (mode) {
        case AugmentMode::prefixed:
            return capitalize_first(*canon) + ", " + prediction;
        case AugmentMode::postfixed:
            return prediction + ", " + *canon;
        case AugmentMode::interleaved:
            break;
    }

    if (!backend || !prompts)
        throw ConfigError("interleaved augmentation requires a backend and prompt set");
    std::string prompt = prompts->render_interleave(question, prediction, *canon);
    auto completions = backend->generate(prompt, 0.0, 1);
    std::string woven(trim(completions.front()));
    if (woven.empty()) throw Error("interleaved augmentation produced an empty output");
    if (count_occurrences(woven, *canon) != 1)
        throw Error("interleaved output does not contain '" + *canon + "' exactly once");
    return woven;
}

std::optional<Disentangled> disentangle_rules(const std::string& augmented,
                                              const ExpressionMap& map) {
    std::string text(trim(augmented));

    // postfixed template: "<prediction>, <expression>"
    if (auto pos = text.rfind(", "); pos != std::string::npos) {
        std::string tail = strip_trailing_punct(text.substr(pos + 2));
        if (auto canon = map.canonical(tail))
            return Disentangled{text.substr(0, pos), *canon};
    }
    // prefixed template: "<Expression>, <prediction>"
    if (auto pos = text.find(", "); pos != std::string::npos) {
        if (auto canon = map.canonical(text.substr(0, pos)))
            return Disentangled{text.substr(pos + 2), *canon};
    }

    // sentence scaffolds produced by the interleaving prompt
    for (const auto& phrase : map.matchable_phrases()) {
        if (count_occurrences(text, phrase) != 1) continue;
        std::string p = regex_escape(phrase);
        static const char* patterns[] = {
            R"(^it is (?:a )?P,? (?:that|but) (.*)$)",
            R"(^there is (?:a )?P,? (?:that|but) (.*)$)",
            R"(^P,? (?:that|but) (.*)$)",
        };
        for (const char* pat : patterns) {
            std::string pattern(pat);
            pattern.replace(pattern.find('P'), 1, p);
            std::smatch m;
            if (std::regex_match(text, m, std::regex(pattern, std::regex::icase))) {
                auto canon = map.canonical(phrase);
                return Disentangled{capitalize_first(std::string(trim(m[1].str()))), *canon};
            }
        }
    }
    return std::nullopt;
}

std::optional<Disentangled> disentangle(const std::string& augmented, const ExpressionMap& map,
                                        ModelBackend* backend, const PromptSet* prompts) {
    if (auto d = disentangle_rules(augmented, map)) return d;
    if (!backend || !prompts) return std::nullopt;

    std::string prompt = prompts->render_disentangle(augmented);
    std::vector<std::string> replies;
    try {
        replies = backend->generate(prompt, 0.0, 1);
    } catch (const BackendError&) {
        return std::nullopt;
    }
    const std::string& reply = replies.front();
    auto field = [&](const std::string& name) -> std::optional<std::string> {
        std::string marker = "{" + name + "}:";
        auto pos = reply.find(marker);
        if (pos == std::string::npos) return std::nullopt;
        auto start = pos + marker.size();
        auto end = reply.find('\n', start);
        if (end == std::string::npos) end = reply.size();
        return std::string(trim(std::string_view(reply).substr(start, end - start)));
    };
    auto answer = field("ANSWER_WITHOUT_UNCERTAINTY");
    auto expr = field("UNCERTAINTY_PHRASE");
    if (!answer || !expr) return std::nullopt;
    auto canon = map.canonical(*expr);
    if (!canon) return std::nullopt;
    return Disentangled{*answer, *canon};
}

}  // namespace uncal
