#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace uncal {

struct IsoPair {
    double x = 0.0;  // raw confidence, in [0,1]
    double y = 0.0;  // target, in [0,1] (the pipeline supplies 0/1 verdicts)
    double w = 1.0;  // positive weight
};

/// Fitted monotone recalibration map. One knot per pooled level set: block_x
/// is the weighted mean of the raw confidences in the block, block_y the block
/// value. transform interpolates linearly between knots and clamps outside.
struct IsotonicModel {
    std::vector<double> block_x;  // strictly ascending
    std::vector<double> block_y;  // non-decreasing, in [0,1]
    int n_fit = 0;

    // weighted squared-error objective of the step fit; not serialized
    double sse = 0.0;

    double transform(double raw) const;

    nlohmann::json to_json() const;
    static IsotonicModel from_json(const nlohmann::json& j);
};

/// Weighted least-squares-optimal non-decreasing step fit via
/// pool-adjacent-violators. Ties in x are pre-pooled to their weighted mean.
IsotonicModel fit_isotonic(std::span<const IsoPair> pairs);

}  // namespace uncal
