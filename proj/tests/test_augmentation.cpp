#include <doctest.h>

#include "uncal/augmentation.hpp"
#include "uncal/errors.hpp"
#include "uncal/rng.hpp"
#include "uncal/simulated_backend.hpp"

using namespace uncal;

namespace {

std::vector<std::string> all_expressions(const ExpressionMap& map) {
    std::vector<std::string> out;
    for (std::size_t b = 0; b < map.bin_count(); ++b)
        for (const auto& e : map.bin(b).expressions) out.push_back(e);
    return out;
}

}  // namespace

TEST_CASE("comma templates are exact") {
    auto map = ExpressionMap::builtin();
    CHECK(augment("Paris", "certain", AugmentMode::prefixed, map) == "Certain, Paris");
    CHECK(augment("Paris", "certain", AugmentMode::postfixed, map) == "Paris, certain");
    CHECK(augment("Paris", "i believe", AugmentMode::prefixed, map) == "I believe, Paris");
    // aliases canonicalize before templating
    CHECK(augment("Paris", "Certainly", AugmentMode::postfixed, map) == "Paris, certain");
}

TEST_CASE("augment validates its expression and interleave dependencies") {
    auto map = ExpressionMap::builtin();
    CHECK_THROWS_AS(augment("Paris", "no idea", AugmentMode::prefixed, map), LookupError);
    CHECK_THROWS_AS(augment("Paris", "certain", AugmentMode::interleaved, map), ConfigError);
}

TEST_CASE("disentangle inverts both comma templates for every expression") {
    auto map = ExpressionMap::builtin();
    auto expressions = all_expressions(map);
    REQUIRE(expressions.size() == 16);
    Rng rng(31ULL);
    for (const auto& expr : expressions) {
        for (int trial = 0; trial < 50; ++trial) {
            std::string prediction =
                "pred-" + std::to_string(rng.next() % 100000) + " alpha beta";
            for (auto mode : {AugmentMode::prefixed, AugmentMode::postfixed}) {
                auto combined = augment(prediction, expr, mode, map);
                auto split = disentangle_rules(combined, map);
                REQUIRE(split.has_value());
                CHECK(split->answer == prediction);
                CHECK(split->expression == expr);
            }
        }
    }
}

TEST_CASE("prefixed predictions may themselves contain commas") {
    auto map = ExpressionMap::builtin();
    auto combined = augment("Paris, France", "certain", AugmentMode::prefixed, map);
    auto split = disentangle_rules(combined, map);
    REQUIRE(split.has_value());
    CHECK(split->answer == "Paris, France");
    CHECK(split->expression == "certain");
}

TEST_CASE("sentence scaffolds disentangle by rule") {
    auto map = ExpressionMap::builtin();

    auto a = disentangle_rules("It is impossible that the Sun rises in the West.", map);
    REQUIRE(a.has_value());
    CHECK(a->answer == "The Sun rises in the West.");
    CHECK(a->expression == "impossible");

    auto b = disentangle_rules("There is little chance but the fact is correct.", map);
    REQUIRE(b.has_value());
    CHECK(b->answer == "The fact is correct.");
    CHECK(b->expression == "little chance");

    auto c = disentangle_rules("There is a very good chance that it is sulphur.", map);
    REQUIRE(c.has_value());
    CHECK(c->answer == "It is sulphur.");
    CHECK(c->expression == "very good chance");

    auto d = disentangle_rules("Probably, that is the right year.", map);
    REQUIRE(d.has_value());
    CHECK(d->expression == "probably");
}

TEST_CASE("interleaved augmentation weaves exactly one expression and strips back out") {
    auto map = ExpressionMap::builtin();
    auto prompts = PromptSet::builtin();
    SimulatedWorld world;
    world.seed = 5;
    world.entries["q1"] = {"sulphur", 0.9};
    SimulatedBackend backend(world);

    auto combined = augment("sulphur", "very good chance", AugmentMode::interleaved, map,
                            &backend, &prompts, world_question_text("q1"));
    CHECK(combined.find("very good chance") != std::string::npos);
    auto split = disentangle(combined, map, &backend, &prompts);
    REQUIRE(split.has_value());
    CHECK(split->expression == "very good chance");
    CHECK(split->answer.find("sulphur") != std::string::npos);
}

TEST_CASE("backend-assisted disentangling handles free-form phrasing") {
    auto map = ExpressionMap::builtin();
    auto prompts = PromptSet::builtin();
    SimulatedWorld world;
    world.seed = 5;
    SimulatedBackend backend(world);

    auto got =
        disentangle("The capital almost certainly might be paris.", map, &backend, &prompts);
    REQUIRE(got.has_value());
    CHECK(got->expression == "almost certain");
    CHECK(got->answer.find("paris") != std::string::npos);

    // nothing resembling a table expression anywhere
    CHECK_FALSE(disentangle("just some text", map, &backend, &prompts).has_value());
    CHECK_FALSE(disentangle("just some text", map).has_value());
}

TEST_CASE("contains_expression is word-bounded and alias-aware") {
    auto map = ExpressionMap::builtin();
    CHECK(contains_expression("It is likely raining", map));
    CHECK(contains_expression("Paris, almost certainly", map));
    CHECK_FALSE(contains_expression("an unlikelyhood of sorts", map));
    CHECK_FALSE(contains_expression("plain statement", map));
}
