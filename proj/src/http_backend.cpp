#include "uncal/http_backend.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "uncal/text.hpp"

namespace uncal {

using nlohmann::json;

namespace {

// splits "http://host:port/path" into base and path
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint_url must include a scheme, got '" + url + "'");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint_url.empty()) throw ConfigError("http backend requires endpoint_url");
    std::tie(host_, path_) = split_url(config_.endpoint_url);
    if (host_.rfind("https://", 0) == 0)
        throw ConfigError("https endpoints are not supported by this build; use an http proxy");
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
    }
}

json HttpBackend::post(const json& body) {
    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::ostringstream attempt_log;
    double backoff = config_.retry.base_backoff;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (res && res->status == 200) {
            try {
                return json::parse(res->body);
            } catch (const json::exception& e) {
                attempt_log << " attempt " << attempt << ": bad JSON (" << e.what() << ");";
            }
        } else if (res) {
            attempt_log << " attempt " << attempt << ": HTTP " << res->status << ";";
            // only retry on rate limiting or server errors
            if (res->status != 429 && res->status < 500)
                throw BackendError("backend request failed:" + attempt_log.str());
        } else {
            attempt_log << " attempt " << attempt << ": transport error "
                        << httplib::to_string(res.error()) << ";";
        }
        if (attempt < config_.retry.max_attempts) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2;
        }
    }
    throw BackendError("backend request failed after " +
                       std::to_string(config_.retry.max_attempts) + " attempts:" +
                       attempt_log.str());
}

std::vector<std::string> HttpBackend::generate(const std::string& prompt, double temperature,
                                               int n) {
    if (n < 1) throw DomainError("generate needs n >= 1");
    json body{{"model", config_.model_name},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", temperature},
              {"n", n}};
    json res = post(body);
    std::vector<std::string> out;
    for (const auto& choice : res.at("choices"))
        out.push_back(choice.at("message").at("content").get<std::string>());
    if (static_cast<int>(out.size()) != n)
        throw BackendError("backend returned " + std::to_string(out.size()) +
                           " completions, expected " + std::to_string(n));
    return out;
}

std::vector<double> HttpBackend::choice_probability(const TokenChoiceQuery& query) {
    if (query.candidates.size() < 2)
        throw DomainError("choice_probability needs >= 2 candidates");
    json body{{"model", config_.model_name},
              {"messages", json::array({json{{"role", "user"}, {"content", query.prompt}}})},
              {"temperature", 0.0},
              {"max_tokens", 1},
              {"logprobs", true},
              {"top_logprobs", 20}};
    json res = post(body);
    const json& choice = res.at("choices").at(0);
    if (!choice.contains("logprobs") || choice.at("logprobs").is_null())
        throw BackendError(
            "backend does not expose per-token log-probabilities; "
            "choice_probability requires logprob support");
    const json& top = choice.at("logprobs").at("content").at(0).at("top_logprobs");

    std::vector<double> raw(query.candidates.size(), 0.0);
    for (const auto& entry : top) {
        std::string token = entry.at("token").get<std::string>();
        double p = std::exp(entry.at("logprob").get<double>());
        for (std::size_t i = 0; i < query.candidates.size(); ++i)
            if (token == query.candidates[i]) raw[i] += p;
    }
    double sum = 0.0;
    for (double r : raw) sum += r;
    if (sum <= 0.0)
        throw BackendError("choice_probability: no probability mass on any candidate token");
    for (double& r : raw) r /= sum;
    return raw;
}

Verdict HttpBackend::judge_equivalence(const std::string& question, const std::string& gold,
                                       const std::string& predicted) {
    std::string prompt = prompts_.render_lme(question, gold, predicted);
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto replies = generate(prompt, 0.0, 1);
        std::string reply = normalize_text(replies.front());
        if (reply.rfind("yes", 0) == 0) return Verdict::yes;
        if (reply.rfind("no", 0) == 0) return Verdict::no;
    }
    return Verdict::unjudged;
}

}  // namespace uncal
