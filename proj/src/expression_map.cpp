#include "uncal/expression_map.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "uncal/errors.hpp"
#include "uncal/rng.hpp"
#include "uncal/text.hpp"

namespace uncal {

using nlohmann::json;

namespace {

ProbabilityBin make_bin(double lower, double upper, std::vector<std::string> exprs) {
    return ProbabilityBin{lower, upper, (lower + upper) / 2.0, std::move(exprs)};
}

const std::map<std::string, std::string> kBuiltinAliases = {
    {"certainly", "certain"},
    {"almost certainly", "almost certain"},
    {"about even", "chances are about even"},
    {"even chances", "chances are about even"},
    {"highly improbable", "improbable"},
};

}  // namespace

ExpressionMap ExpressionMap::builtin() {
    ExpressionMap m;
    m.bins_ = {
        make_bin(1.00, 1.00, {"certain"}),
        make_bin(0.87, 0.99, {"almost certain", "highly likely"}),
        make_bin(0.75, 0.86, {"very good chance", "likely"}),
        make_bin(0.63, 0.74, {"i believe", "probably", "probable"}),
        make_bin(0.40, 0.62, {"chances are about even"}),
        make_bin(0.18, 0.39, {"i doubt", "unlikely"}),
        make_bin(0.02, 0.17, {"little chance", "chances are slight", "improbable",
                              "highly unlikely"}),
        make_bin(0.00, 0.01, {"impossible"}),
    };
    // Gap-closing assignment edges, ascending; the top bin is the point {1.0}.
    m.edges_ = {0.0, 0.02, 0.18, 0.40, 0.63, 0.75, 0.87, 1.0};
    for (const auto& [alias, target] : kBuiltinAliases)
        m.alias_to_expr_[normalize_text(alias)] = target;
    m.index_table();
    return m;
}

ExpressionMap ExpressionMap::from_json(const json& j) {
    ExpressionMap m;
    for (const auto& b : j.at("bins")) {
        double lower = b.at("lower").get<double>();
        double upper = b.at("upper").get<double>();
        auto exprs = b.at("expressions").get<std::vector<std::string>>();
        if (lower < 0.0 || upper > 1.0 || lower > upper)
            throw ParseError("expression map bin range invalid");
        if (exprs.empty()) throw ParseError("expression map bin has no expressions");
        m.bins_.push_back(make_bin(lower, upper, std::move(exprs)));
        if (b.contains("representative")) {
            double rep = b.at("representative").get<double>();
            if (std::abs(rep - m.bins_.back().representative) > 1e-12)
                throw ParseError("representative must be the range midpoint");
        }
    }
    if (m.bins_.empty()) throw ParseError("expression map has no bins");
    for (std::size_t i = 1; i < m.bins_.size(); ++i)
        if (m.bins_[i - 1].lower <= m.bins_[i].lower)
            throw ParseError("expression map bins must be descending by lower bound");
    if (j.contains("assignment_edges")) {
        m.edges_ = j.at("assignment_edges").get<std::vector<double>>();
    } else {
        // derive lower-edge intervals from the bin lowers, ascending
        for (auto it = m.bins_.rbegin(); it != m.bins_.rend(); ++it) m.edges_.push_back(it->lower);
    }
    if (m.edges_.size() != m.bins_.size() || m.edges_.front() != 0.0 || m.edges_.back() > 1.0 ||
        !std::is_sorted(m.edges_.begin(), m.edges_.end()))
        throw ParseError("assignment edges must ascend from 0 and cover [0,1]");
    if (j.contains("aliases"))
        for (const auto& [alias, target] : j.at("aliases").items())
            m.alias_to_expr_[normalize_text(alias)] = target.get<std::string>();
    m.index_table();
    return m;
}

void ExpressionMap::index_table() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        for (const auto& e : bins_[i].expressions) {
            std::string key = normalize_text(e);
            if (!seen.insert(key).second)
                throw ParseError("expression '" + e + "' appears in more than one bin");
            expr_to_bin_[key] = static_cast<int>(i);
        }
    }
    for (const auto& [alias, target] : alias_to_expr_)
        if (!expr_to_bin_.count(normalize_text(target)))
            throw ParseError("alias target '" + target + "' is not a table entry");

    phrases_.clear();
    for (const auto& b : bins_)
        for (const auto& e : b.expressions) phrases_.push_back(e);
    for (const auto& [alias, target] : alias_to_expr_) phrases_.push_back(alias);
    std::sort(phrases_.begin(), phrases_.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
}

int ExpressionMap::bin_of(double confidence) const {
    if (!(confidence >= 0.0 && confidence <= 1.0))
        throw DomainError("confidence outside [0,1]");
    if (confidence >= edges_.back()) return 0;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), confidence);
    std::size_t interval = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return static_cast<int>(bins_.size() - 1 - interval);
}

std::string ExpressionMap::expression_for(double confidence, std::uint64_t rng_seed) const {
    const auto& exprs = bins_[static_cast<std::size_t>(bin_of(confidence))].expressions;
    if (exprs.size() == 1) return exprs.front();
    Rng rng(rng_seed);
    return exprs[rng.bounded(exprs.size())];
}

std::optional<std::string> ExpressionMap::canonical(std::string_view phrase) const {
    std::string key = normalize_text(phrase);
    if (auto it = alias_to_expr_.find(key); it != alias_to_expr_.end()) return it->second;
    if (auto it = expr_to_bin_.find(key); it != expr_to_bin_.end()) {
        const auto& exprs = bins_[static_cast<std::size_t>(it->second)].expressions;
        for (const auto& e : exprs)
            if (normalize_text(e) == key) return e;
    }
    return std::nullopt;
}

int ExpressionMap::bin_of_expression(std::string_view expression) const {
    auto canon = canonical(expression);
    if (!canon) {
        std::ostringstream msg;
        msg << "unrecognized expression '" << expression << "'; valid expressions:";
        for (const auto& b : bins_)
            for (const auto& e : b.expressions) msg << " '" << e << "'";
        throw LookupError(msg.str());
    }
    return expr_to_bin_.at(normalize_text(*canon));
}

double ExpressionMap::probability_of(std::string_view expression) const {
    return bins_[static_cast<std::size_t>(bin_of_expression(expression))].representative;
}

}  // namespace uncal
