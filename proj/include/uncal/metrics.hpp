#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "uncal/expression_map.hpp"

namespace uncal {

struct ScoredPoint {
    double confidence = 0.0;  // in [0,1]
    bool correct = false;
};

struct BinStat {
    int bin_index = 0;
    long count = 0;
    std::optional<double> accuracy;           // absent when count == 0
    std::optional<double> mean_confidence;    // absent when count == 0
    std::optional<double> accuracy_variance;  // binomial: acc*(1-acc)/count
};

struct CalibrationReport {
    std::vector<BinStat> bins;  // one per ExpressionMap bin
    double ece = 0.0;
    double brier = 0.0;
    long n = 0;

    nlohmann::json to_json() const;
};

/// Sum over bins of (|B_m|/n) * |Acc(B_m) - mean confidence in B_m|.
/// Empty bins contribute 0; empty input is an error.
double ece(std::span<const ScoredPoint> points, const ExpressionMap& map);

/// Mean squared error between confidence and the 0/1 verdict.
double brier(std::span<const ScoredPoint> points);

CalibrationReport calibration_report(std::span<const ScoredPoint> points,
                                     const ExpressionMap& map);

/// CSV rows (bin_low, bin_high, count, accuracy, mean_confidence, variance)
/// for external plotting.
std::string report_csv(const CalibrationReport& report, const ExpressionMap& map);

}  // namespace uncal
