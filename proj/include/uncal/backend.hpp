#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "uncal/errors.hpp"

namespace uncal {

struct RetryPolicy {
    int max_attempts = 3;
    double base_backoff = 0.5;  // seconds, doubled per attempt
};

struct BackendConfig {
    std::string kind = "simulated";  // "http" or "simulated"
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env = "MODEL_API_KEY";
    int max_parallel = 4;
    double timeout = 30.0;  // seconds
    RetryPolicy retry;

    std::string world_path;  // simulated only
    std::uint64_t seed = 0;  // simulated only

    static BackendConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct TokenChoiceQuery {
    std::string prompt;
    std::vector<std::string> candidates;  // >= 2, pairwise distinct
};

enum class Verdict { yes, no, unjudged };

/// The four model capabilities the pipelines need. Implementations must be
/// safe for concurrent calls up to max_parallel; all result ordering is by
/// input index, never completion order.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    virtual std::vector<std::string> generate(const std::string& prompt, double temperature,
                                              int n) = 0;

    /// Probabilities over exactly the candidate strings, renormalized to sum
    /// to 1. All-zero raw mass is a BackendError, never NaN.
    virtual std::vector<double> choice_probability(const TokenChoiceQuery& query) = 0;

    virtual Verdict judge_equivalence(const std::string& question, const std::string& gold,
                                      const std::string& predicted) = 0;

    /// OR over golds; unjudged only if some comparison was unjudged and none said yes.
    Verdict judge_any(const std::string& question, const std::vector<std::string>& golds,
                      const std::string& predicted);

    virtual int max_parallel() const { return 1; }
};

std::unique_ptr<ModelBackend> make_backend(const BackendConfig& config);

/// Applies fn to indices [0, n) with at most max_parallel worker threads.
/// Results land at their input index; the first exception is rethrown after
/// all workers stop.
void parallel_for_indexed(std::size_t n, int max_parallel,
                          const std::function<void(std::size_t)>& fn);

}  // namespace uncal
