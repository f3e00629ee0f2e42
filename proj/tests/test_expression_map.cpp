#include <doctest.h>

#include "uncal/errors.hpp"
#include "uncal/expression_map.hpp"

using namespace uncal;
using nlohmann::json;

TEST_CASE("table endpoints map to their bins") {
    auto map = ExpressionMap::builtin();
    CHECK(map.bin(static_cast<std::size_t>(map.bin_of(1.0))).expressions ==
          std::vector<std::string>{"certain"});
    CHECK(map.bin(static_cast<std::size_t>(map.bin_of(0.005))).expressions ==
          std::vector<std::string>{"impossible"});
    // inside the published 0.99-1.00 gap: lower-edge rule assigns the 0.87 bin
    CHECK(map.bin(static_cast<std::size_t>(map.bin_of(0.995))).lower == doctest::Approx(0.87));
    CHECK(map.bin(static_cast<std::size_t>(map.bin_of(0.175))).lower == doctest::Approx(0.02));
}

TEST_CASE("bin_of is total on a 10,001-point grid and monotone") {
    auto map = ExpressionMap::builtin();
    int prev = static_cast<int>(map.bin_count());
    for (int i = 0; i <= 10000; ++i) {
        double c = static_cast<double>(i) / 10000.0;
        int b = map.bin_of(c);
        REQUIRE(b >= 0);
        REQUIRE(b < static_cast<int>(map.bin_count()));
        // bins are stored descending, so index never increases with confidence
        REQUIRE(b <= prev);
        prev = b;
    }
}

TEST_CASE("bin_of rejects out-of-domain confidences") {
    auto map = ExpressionMap::builtin();
    CHECK_THROWS_AS(map.bin_of(-0.001), DomainError);
    CHECK_THROWS_AS(map.bin_of(1.001), DomainError);
}

TEST_CASE("probability_of returns the printed midpoints") {
    auto map = ExpressionMap::builtin();
    CHECK(map.probability_of("impossible") == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(map.probability_of("certain") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map.probability_of("unlikely") == doctest::Approx(0.285).epsilon(1e-12));
    CHECK(map.probability_of("highly unlikely") == doctest::Approx(0.095).epsilon(1e-12));
    CHECK(map.probability_of("chances are about even") == doctest::Approx(0.51).epsilon(1e-12));
}

TEST_CASE("expression round trip: every expression lies in its own bin") {
    auto map = ExpressionMap::builtin();
    for (std::size_t b = 0; b < map.bin_count(); ++b) {
        for (const auto& e : map.bin(b).expressions) {
            double p = map.probability_of(e);
            int owner = map.bin_of(p);
            const auto& exprs = map.bin(static_cast<std::size_t>(owner)).expressions;
            CHECK(std::find(exprs.begin(), exprs.end(), e) != exprs.end());
        }
    }
}

TEST_CASE("expression matching is case-insensitive, punctuation-tolerant, alias-aware") {
    auto map = ExpressionMap::builtin();
    CHECK(map.canonical("  Highly Likely. ") == "highly likely");
    CHECK(map.canonical("certainly") == "certain");
    CHECK(map.canonical("Almost Certainly") == "almost certain");
    CHECK(map.canonical("about even") == "chances are about even");
    CHECK_FALSE(map.canonical("no idea").has_value());
    CHECK_THROWS_WITH_AS(map.probability_of("no idea"), doctest::Contains("valid expressions"),
                         LookupError);
}

TEST_CASE("expression_for draws from the right bin, deterministically per seed") {
    auto map = ExpressionMap::builtin();
    CHECK(map.expression_for(1.0, 5) == "certain");
    CHECK(map.expression_for(0.50, 17) == "chances are about even");
    std::string a = map.expression_for(0.90, 1);
    std::string b = map.expression_for(0.90, 1);
    CHECK(a == b);
    CHECK((a == "almost certain" || a == "highly likely"));
}

TEST_CASE("JSON override is validated against the invariants") {
    json good{{"bins",
               json::array({json{{"lower", 0.5}, {"upper", 1.0}, {"expressions", {"hi"}}},
                            json{{"lower", 0.0}, {"upper", 0.5}, {"expressions", {"lo"}}}})}};
    auto map = ExpressionMap::from_json(good);
    CHECK(map.bin_count() == 2);
    CHECK(map.probability_of("hi") == doctest::Approx(0.75));
    CHECK(map.bin_of(0.25) == 1);

    json dup = good;
    dup["bins"][1]["expressions"] = {"hi"};
    CHECK_THROWS_AS(ExpressionMap::from_json(dup), ParseError);

    json bad_rep = good;
    bad_rep["bins"][0]["representative"] = 0.9;
    CHECK_THROWS_AS(ExpressionMap::from_json(bad_rep), ParseError);

    json empty{{"bins", json::array()}};
    CHECK_THROWS_AS(ExpressionMap::from_json(empty), ParseError);
}
