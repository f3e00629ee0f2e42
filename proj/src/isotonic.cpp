#include "uncal/isotonic.hpp"

#include <algorithm>
#include <cmath>

#include "uncal/errors.hpp"

namespace uncal {

using nlohmann::json;

double IsotonicModel::transform(double raw) const {
    if (!(raw >= 0.0 && raw <= 1.0)) throw DomainError("raw confidence outside [0,1]");
    if (block_x.empty()) throw FitError("transform on unfitted model");
    if (raw <= block_x.front()) return block_y.front();
    if (raw >= block_x.back()) return block_y.back();
    auto it = std::upper_bound(block_x.begin(), block_x.end(), raw);
    std::size_t hi = static_cast<std::size_t>(it - block_x.begin());
    std::size_t lo = hi - 1;
    double t = (raw - block_x[lo]) / (block_x[hi] - block_x[lo]);
    return block_y[lo] + t * (block_y[hi] - block_y[lo]);
}

json IsotonicModel::to_json() const {
    return json{{"block_x", block_x}, {"block_y", block_y}, {"n_fit", n_fit}};
}

IsotonicModel IsotonicModel::from_json(const json& j) {
    IsotonicModel m;
    m.block_x = j.at("block_x").get<std::vector<double>>();
    m.block_y = j.at("block_y").get<std::vector<double>>();
    m.n_fit = j.at("n_fit").get<int>();
    if (m.block_x.size() != m.block_y.size() || m.block_x.empty())
        throw ParseError("isotonic model: block_x/block_y size mismatch");
    for (std::size_t i = 1; i < m.block_x.size(); ++i) {
        if (m.block_x[i] <= m.block_x[i - 1]) throw ParseError("block_x not strictly ascending");
        if (m.block_y[i] < m.block_y[i - 1]) throw ParseError("block_y decreasing");
    }
    for (double y : m.block_y)
        if (y < 0.0 || y > 1.0) throw ParseError("block_y outside [0,1]");
    return m;
}

IsotonicModel fit_isotonic(std::span<const IsoPair> pairs) {
    if (pairs.size() < 2) throw FitError("isotonic fit needs at least 2 pairs");
    for (const auto& p : pairs) {
        if (!(p.x >= 0.0 && p.x <= 1.0)) throw DomainError("raw confidence outside [0,1]");
        if (!(p.y >= 0.0 && p.y <= 1.0)) throw DomainError("target outside [0,1]");
        if (!(p.w > 0.0)) throw DomainError("weight must be positive");
    }

    std::vector<IsoPair> sorted(pairs.begin(), pairs.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const IsoPair& a, const IsoPair& b) { return a.x < b.x; });

    // Pre-pool ties in x to their weighted mean.
    struct Point {
        double x, y, w;
    };
    std::vector<Point> pts;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        double sw = 0.0, swy = 0.0;
        while (j < sorted.size() && sorted[j].x == sorted[i].x) {
            sw += sorted[j].w;
            swy += sorted[j].w * sorted[j].y;
            ++j;
        }
        pts.push_back({sorted[i].x, swy / sw, sw});
        i = j;
    }
    if (pts.size() < 2) throw FitError("isotonic fit needs at least 2 distinct x values");

    // PAVA over the pooled points.
    struct Block {
        double sw, swy, swx;
        std::size_t end;  // one past the last pooled point in this block
        double mean() const { return swy / sw; }
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        blocks.push_back({pts[i].w, pts[i].w * pts[i].y, pts[i].w * pts[i].x, i + 1});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
            Block b = blocks.back();
            blocks.pop_back();
            blocks.back().sw += b.sw;
            blocks.back().swy += b.swy;
            blocks.back().swx += b.swx;
            blocks.back().end = b.end;
        }
    }

    IsotonicModel model;
    model.n_fit = static_cast<int>(pairs.size());
    std::vector<double> fitted(pts.size());
    std::size_t start = 0;
    for (const auto& b : blocks) {
        double value = std::clamp(b.mean(), 0.0, 1.0);
        model.block_x.push_back(b.swx / b.sw);
        model.block_y.push_back(value);
        for (std::size_t i = start; i < b.end; ++i) fitted[i] = value;
        start = b.end;
    }

    // Objective over the original pairs against the step fit.
    model.sse = 0.0;
    {
        std::size_t pi = 0;
        for (const auto& p : sorted) {
            while (p.x != pts[pi].x) ++pi;
            double d = p.y - fitted[pi];
            model.sse += p.w * d * d;
        }
    }
    return model;
}

}  // namespace uncal
