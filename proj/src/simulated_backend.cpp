#include "uncal/simulated_backend.hpp"

#include <algorithm>
#include <regex>

#include "uncal/records.hpp"
#include "uncal/rng.hpp"
#include "uncal/text.hpp"

namespace uncal {

using nlohmann::json;

SimulatedWorld SimulatedWorld::load(const std::filesystem::path& path, std::uint64_t seed) {
    SimulatedWorld world;
    world.seed = seed;
    for (const auto& obj : jsonl::read_objects(path)) {
        Entry e;
        std::string id = obj.at("question_id").get<std::string>();
        e.canonical_answer = obj.at("canonical_answer").get<std::string>();
        e.knowledge_level = obj.at("knowledge_level").get<double>();
        if (e.knowledge_level < 0.0 || e.knowledge_level > 1.0)
            throw ParseError("knowledge_level outside [0,1] for '" + id + "'");
        if (!world.entries.emplace(std::move(id), std::move(e)).second)
            throw ParseError("duplicate question_id in world file");
    }
    return world;
}

void SimulatedWorld::save(const std::filesystem::path& path) const {
    std::vector<json> objs;
    for (const auto& [id, e] : entries)
        objs.push_back(json{{"question_id", id},
                            {"canonical_answer", e.canonical_answer},
                            {"knowledge_level", e.knowledge_level}});
    jsonl::write_objects(path, objs);
}

SimulatedWorld generate_world(int n, std::uint64_t seed) {
    SimulatedWorld world;
    world.seed = seed;
    for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "q%05d", i);
        Rng rng = keyed_rng(seed, "world", id);
        SimulatedWorld::Entry e;
        e.canonical_answer = "phrase-" + std::to_string(i) + "-" + std::to_string(rng.next() % 10000);
        e.knowledge_level = rng.uniform();
        world.entries.emplace(id, std::move(e));
    }
    return world;
}

std::string world_question_text(const std::string& question_id) {
    return "What is the secret phrase for record [qid:" + question_id + "]?";
}

std::optional<std::string> extract_qid(const std::string& text) {
    static const std::regex re(R"(\[qid:([^\]]+)\])");
    std::optional<std::string> result;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it)
        result = (*it)[1].str();
    return result;
}

namespace {

// Value of the last "\n{FIELD}: ..." line in a rendered prompt.
std::optional<std::string> last_field(const std::string& text, const std::string& field) {
    std::string marker = "{" + field + "}: ";
    auto pos = text.rfind(marker);
    if (pos == std::string::npos) return std::nullopt;
    auto start = pos + marker.size();
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    return text.substr(start, end - start);
}

std::optional<std::string> last_plain_field(const std::string& text, const std::string& marker) {
    auto pos = text.rfind(marker);
    if (pos == std::string::npos) return std::nullopt;
    auto start = pos + marker.size();
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    return text.substr(start, end - start);
}

}  // namespace

SimulatedBackend::SimulatedBackend(SimulatedWorld world) : world_(std::move(world)) {}

const SimulatedWorld::Entry& SimulatedBackend::entry_for(const std::string& prompt) const {
    auto qid = extract_qid(prompt);
    if (!qid) throw BackendError("simulated backend: prompt carries no [qid:...] tag");
    auto it = world_.entries.find(*qid);
    if (it == world_.entries.end())
        throw BackendError("simulated backend: unknown question id '" + *qid + "'");
    return it->second;
}

std::vector<std::string> SimulatedBackend::generate(const std::string& prompt,
                                                    double /*temperature*/, int n) {
    if (n < 1) throw DomainError("generate needs n >= 1");
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));

    if (prompt.find("{MODIFIED_ANSWER}:") != std::string::npos) {
        // interleave request: weave the expression into a sentence
        auto answer = last_field(prompt, "ANSWER").value_or("");
        auto expr = last_field(prompt, "PROBABILITY_EXPRESSION").value_or("");
        std::string woven = "It is " + expr + " that the answer is " + answer + ".";
        for (int i = 0; i < n; ++i) out.push_back(woven);
        return out;
    }
    if (prompt.find("{ANSWER_WITHOUT_UNCERTAINTY}") != std::string::npos) {
        // disentangle request: strip the first known phrase it can find
        auto augmented = last_field(prompt, "ANSWER").value_or("");
        std::string lowered = to_lower(augmented);
        for (const auto& phrase : map_.matchable_phrases()) {
            auto pos = lowered.find(to_lower(phrase));
            if (pos == std::string::npos) continue;
            std::string stripped = augmented;
            stripped.erase(pos, phrase.size());
            // drop scaffolding like "It is  that " around the removed phrase
            static const std::regex scaffold(
                R"(^\s*(it is|there is a|there is)?\s*(that|but)?\s*)",
                std::regex::icase);
            stripped = std::regex_replace(stripped, scaffold, "", std::regex_constants::format_first_only);
            std::string reply = "{ANSWER_WITHOUT_UNCERTAINTY}: " + capitalize_first(stripped) +
                                "\n{UNCERTAINTY_PHRASE}: " + phrase + "\n";
            for (int i = 0; i < n; ++i) out.push_back(reply);
            return out;
        }
        for (int i = 0; i < n; ++i)
            out.push_back("{ANSWER_WITHOUT_UNCERTAINTY}: " + augmented +
                          "\n{UNCERTAINTY_PHRASE}: none\n");
        return out;
    }
    if (prompt.find("Semantically equivalent:") != std::string::npos) {
        auto a = last_plain_field(prompt, "Answer A: ").value_or("");
        auto b = last_plain_field(prompt, "Answer B: ").value_or("");
        std::string reply = normalize_text(a) == normalize_text(b) ? "YES" : "NO";
        for (int i = 0; i < n; ++i) out.push_back(reply);
        return out;
    }

    // plain answer generation
    const auto& entry = entry_for(prompt);
    auto qid = *extract_qid(prompt);
    for (int i = 0; i < n; ++i) {
        Rng rng = keyed_rng(world_.seed, "gen", qid, static_cast<std::uint64_t>(i));
        if (rng.uniform() < entry.knowledge_level)
            out.push_back(entry.canonical_answer);
        else
            out.push_back("wrong-" + qid);
    }
    return out;
}

std::vector<double> SimulatedBackend::choice_probability(const TokenChoiceQuery& query) {
    if (query.candidates.size() < 2)
        throw DomainError("choice_probability needs >= 2 candidates");
    const auto& entry = entry_for(query.prompt);
    auto qid = *extract_qid(query.prompt);
    auto proposed = last_field(query.prompt, "PROPOSED_ANSWER").value_or("");
    bool correct = normalize_text(proposed) == normalize_text(entry.canonical_answer);

    Rng rng = keyed_rng(world_.seed, "conf", qid, hash_str(proposed));
    double eps = (rng.uniform() - 0.5) * 0.1;  // uniform in [-0.05, 0.05]
    double base = correct ? entry.knowledge_level : 1.0 - entry.knowledge_level;
    double p_true = std::clamp(base + eps, 0.0, 1.0);

    std::vector<double> raw(query.candidates.size(), 0.0);
    for (std::size_t i = 0; i < query.candidates.size(); ++i) {
        if (query.candidates[i] == "True") raw[i] = p_true;
        if (query.candidates[i] == "False") raw[i] = 1.0 - p_true;
    }
    double sum = 0.0;
    for (double r : raw) sum += r;
    if (sum <= 0.0) throw BackendError("choice_probability: zero mass over candidates");
    for (double& r : raw) r /= sum;
    return raw;
}

Verdict SimulatedBackend::judge_equivalence(const std::string& /*question*/,
                                            const std::string& gold,
                                            const std::string& predicted) {
    return normalize_text(gold) == normalize_text(predicted) ? Verdict::yes : Verdict::no;
}

}  // namespace uncal
