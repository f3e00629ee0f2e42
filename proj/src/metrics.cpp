#include "uncal/metrics.hpp"

#include <cmath>
#include <sstream>

#include "uncal/errors.hpp"

namespace uncal {

using nlohmann::json;

CalibrationReport calibration_report(std::span<const ScoredPoint> points,
                                     const ExpressionMap& map) {
    if (points.empty()) throw DomainError("calibration report over empty input");

    const std::size_t nbins = map.bin_count();
    std::vector<long> count(nbins, 0), correct(nbins, 0);
    std::vector<double> conf_sum(nbins, 0.0);
    double brier_sum = 0.0;
    for (const auto& p : points) {
        auto b = static_cast<std::size_t>(map.bin_of(p.confidence));
        ++count[b];
        if (p.correct) ++correct[b];
        conf_sum[b] += p.confidence;
        double d = p.confidence - (p.correct ? 1.0 : 0.0);
        brier_sum += d * d;
    }

    CalibrationReport report;
    report.n = static_cast<long>(points.size());
    report.brier = brier_sum / static_cast<double>(points.size());
    double ece_sum = 0.0;
    for (std::size_t b = 0; b < nbins; ++b) {
        BinStat stat;
        stat.bin_index = static_cast<int>(b);
        stat.count = count[b];
        if (count[b] > 0) {
            double acc = static_cast<double>(correct[b]) / static_cast<double>(count[b]);
            double mean_conf = conf_sum[b] / static_cast<double>(count[b]);
            stat.accuracy = acc;
            stat.mean_confidence = mean_conf;
            stat.accuracy_variance = acc * (1.0 - acc) / static_cast<double>(count[b]);
            ece_sum += static_cast<double>(count[b]) / static_cast<double>(points.size()) *
                       std::abs(acc - mean_conf);
        }
        report.bins.push_back(stat);
    }
    report.ece = ece_sum;
    return report;
}

double ece(std::span<const ScoredPoint> points, const ExpressionMap& map) {
    return calibration_report(points, map).ece;
}

double brier(std::span<const ScoredPoint> points) {
    if (points.empty()) throw DomainError("brier over empty input");
    double sum = 0.0;
    for (const auto& p : points) {
        double d = p.confidence - (p.correct ? 1.0 : 0.0);
        sum += d * d;
    }
    return sum / static_cast<double>(points.size());
}

json CalibrationReport::to_json() const {
    json bins_json = json::array();
    for (const auto& b : bins) {
        json jb{{"bin_index", b.bin_index}, {"count", b.count}};
        jb["accuracy"] = b.accuracy ? json(*b.accuracy) : json(nullptr);
        jb["mean_confidence"] = b.mean_confidence ? json(*b.mean_confidence) : json(nullptr);
        jb["accuracy_variance"] =
            b.accuracy_variance ? json(*b.accuracy_variance) : json(nullptr);
        bins_json.push_back(jb);
    }
    return json{{"bins", bins_json}, {"ece", ece}, {"brier", brier}, {"n", n}};
}

std::string report_csv(const CalibrationReport& report, const ExpressionMap& map) {
    std::ostringstream out;
    out << "bin_low,bin_high,count,accuracy,mean_confidence,variance\n";
    for (const auto& stat : report.bins) {
        const auto& bin = map.bin(static_cast<std::size_t>(stat.bin_index));
        out << bin.lower << "," << bin.upper << "," << stat.count << ",";
        if (stat.count > 0)
            out << *stat.accuracy << "," << *stat.mean_confidence << ","
                << *stat.accuracy_variance;
        else
            out << ",,";
        out << "\n";
    }
    return out.str();
}

}  // namespace uncal
