#pragma once

// Test-only oracles, independent of the library implementations they check.

#include <cmath>
#include <limits>
#include <vector>

#include "uncal/isotonic.hpp"
#include "uncal/rng.hpp"

namespace uncal::testing {

/// Exhaustive isotonic oracle for small n: enumerates every partition of the
/// x-sorted points into consecutive blocks, keeps those whose weighted block
/// means are non-decreasing, and returns the minimum squared error. Any
/// monotone step function is dominated by some such partition, so this is the
/// global optimum.
struct OracleFit {
    double sse = std::numeric_limits<double>::infinity();
    std::vector<double> fitted;  // per sorted point
};

inline OracleFit isotonic_oracle(std::vector<IsoPair> pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const IsoPair& a, const IsoPair& b) { return a.x < b.x; });
    const std::size_t n = pairs.size();
    OracleFit best;
    for (std::uint64_t mask = 0; mask < (1ULL << (n - 1)); ++mask) {
        // bit k set = block boundary between points k and k+1
        std::vector<double> fitted(n);
        double sse = 0.0;
        double prev_mean = -std::numeric_limits<double>::infinity();
        bool feasible = true;
        std::size_t start = 0;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            bool boundary = i == n - 1 || (mask >> i) & 1;
            if (!boundary) continue;
            double sw = 0.0, swy = 0.0;
            for (std::size_t j = start; j <= i; ++j) {
                sw += pairs[j].w;
                swy += pairs[j].w * pairs[j].y;
            }
            double mean = swy / sw;
            if (mean < prev_mean) {
                feasible = false;
                break;
            }
            prev_mean = mean;
            for (std::size_t j = start; j <= i; ++j) {
                fitted[j] = mean;
                double d = pairs[j].y - mean;
                sse += pairs[j].w * d * d;
            }
            start = i + 1;
        }
        if (feasible && sse < best.sse) {
            best.sse = sse;
            best.fitted = fitted;
        }
    }
    return best;
}

/// Random isotonic instance with distinct x values, 0/1 labels, random weights.
inline std::vector<IsoPair> random_instance(Rng& rng, std::size_t max_n) {
    std::size_t n = 2 + rng.bounded(max_n - 1);
    std::vector<IsoPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        double x = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n);
        double y = rng.uniform() < 0.5 ? 0.0 : 1.0;
        double w = 0.25 + rng.uniform();
        pairs.push_back({x, y, w});
    }
    return pairs;
}

}  // namespace uncal::testing
