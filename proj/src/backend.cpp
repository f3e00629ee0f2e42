#include "uncal/backend.hpp"

#include <mutex>

#include "uncal/http_backend.hpp"
#include "uncal/simulated_backend.hpp"

namespace uncal {

using nlohmann::json;

BackendConfig BackendConfig::from_json(const json& j) {
    BackendConfig c;
    c.kind = j.value("kind", c.kind);
    if (c.kind != "http" && c.kind != "simulated")
        throw ConfigError("backend kind must be 'http' or 'simulated'");
    c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
    c.model_name = j.value("model_name", c.model_name);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.max_parallel = j.value("max_parallel", c.max_parallel);
    c.timeout = j.value("timeout", c.timeout);
    if (j.contains("retry")) {
        c.retry.max_attempts = j.at("retry").value("max_attempts", c.retry.max_attempts);
        c.retry.base_backoff = j.at("retry").value("base_backoff", c.retry.base_backoff);
    }
    c.world_path = j.value("world_path", c.world_path);
    c.seed = j.value("seed", c.seed);
    if (c.max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
    if (!(c.timeout > 0)) throw ConfigError("timeout must be > 0");
    return c;
}

json BackendConfig::to_json() const {
    return json{{"kind", kind},
                {"endpoint_url", endpoint_url},
                {"model_name", model_name},
                {"api_key_env", api_key_env},
                {"max_parallel", max_parallel},
                {"timeout", timeout},
                {"retry", {{"max_attempts", retry.max_attempts}, {"base_backoff", retry.base_backoff}}},
                {"world_path", world_path},
                {"seed", seed}};
}

Verdict ModelBackend::judge_any(const std::string& question,
                                const std::vector<std::string>& golds,
                                const std::string& predicted) {
    bool any_unjudged = false;
    for (const auto& gold : golds) {
        switch (judge_equivalence(question, gold, predicted)) {
            case Verdict::yes: return Verdict::yes;
            case Verdict::unjudged: any_unjudged = true; break;
            case Verdict::no: break;
        }
    }
    return any_unjudged ? Verdict::unjudged : Verdict::no;
}

std::unique_ptr<ModelBackend> make_backend(const BackendConfig& config) {
    if (config.kind == "simulated") {
        if (config.world_path.empty())
            throw ConfigError("simulated backend requires world_path");
        return std::make_unique<SimulatedBackend>(
            SimulatedWorld::load(config.world_path, config.seed));
    }
    return std::make_unique<HttpBackend>(config);
}

void parallel_for_indexed(std::size_t n, int max_parallel,
                          const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    int workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, max_parallel)), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error) return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace uncal
