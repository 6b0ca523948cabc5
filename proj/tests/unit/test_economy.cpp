#include "doctest.h"

#include <cmath>
#include <numeric>

#include "roundtable/economy.hpp"
#include "roundtable/random.hpp"
#include "support.hpp"

using namespace roundtable;

TEST_SUITE("economy") {

TEST_CASE("presets build K exponent vectors summing to one where expected") {
    const auto lit = make_utilities(UtilitySetPreset::AsymmetricLiteral, 3);
    REQUIRE(lit.size() == 3);
    CHECK(lit[1].theta[1] == doctest::Approx(0.8));
    CHECK(lit[1].theta[0] == doctest::Approx(0.2 / 3));
    const auto norm = make_utilities(UtilitySetPreset::AsymmetricNormalized, 3);
    const auto sym = make_utilities(UtilitySetPreset::Symmetric, 3);
    const auto uni = make_utilities(UtilitySetPreset::Uniform, 4);
    for (const auto& u : norm) CHECK(std::accumulate(u.theta.begin(), u.theta.end(), 0.0) == doctest::Approx(1.0));
    for (const auto& u : uni) CHECK(std::accumulate(u.theta.begin(), u.theta.end(), 0.0) == doctest::Approx(1.0));
    for (const auto& u : sym) CHECK(u.theta[0] == doctest::Approx(0.8));
    CHECK(parse_preset("Symmetric") == UtilitySetPreset::Symmetric);
    CHECK_THROWS(parse_preset("lopsided"));
}

TEST_CASE("Cobb-Douglas treats zero to the zero as one and rejects negatives") {
    const std::vector<double> theta{0.5, 0.0};
    CHECK(cobb_douglas(std::vector<double>{4.0, 0.0}, theta) == doctest::Approx(2.0));
    CHECK(cobb_douglas(std::vector<double>{0.0, 5.0}, theta) == 0.0);
    CHECK_THROWS_AS(cobb_douglas(std::vector<double>{-1.0, 1.0}, theta), std::domain_error);
}

TEST_CASE("even split is feasible and roundtrips through json") {
    const auto a = Allocation::even_split(3, 3);
    CHECK(a.feasible());
    CHECK(a.at(2, 1) == doctest::Approx(100.0 / 3));
    CHECK(Allocation::from_json(a.to_json()) == a);
    Allocation bad = a;
    bad.at(0, 0) += 1.0;
    CHECK_FALSE(bad.feasible());
    bad.at(0, 0) = -1.0;
    CHECK_FALSE(bad.feasible());
}

TEST_CASE("simplex projection lands on the simplex and fixes feasible points") {
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(4);
        for (auto& v : x) v = rng.uniform(-50, 150);
        project_to_simplex(x, 100.0);
        double sum = 0.0;
        for (double v : x) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(100.0).epsilon(1e-12));
        auto again = x;
        project_to_simplex(again, 100.0);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(again[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
}

TEST_CASE("u_max matches the independent multistart optimizer for K = 3") {
    const Json gold = Json::parse(test_support::read_file(test_support::golden("umax_k3.json")));
    for (const auto& [name, value] : gold.items()) {
        const auto r = u_max(parse_preset(name), 3);
        CHECK_MESSAGE(r.value == doctest::Approx(value.get<double>()).epsilon(1e-9), name);
        CHECK(r.argmax.feasible());
        CHECK(group_total(r.argmax, make_utilities(parse_preset(name), 3)) == doctest::Approx(r.value));
    }
}

TEST_CASE("uniform exponents give exactly the total quantity") {
    for (int k = 2; k <= 5; ++k) {
        CHECK(u_max(UtilitySetPreset::Uniform, k).value == doctest::Approx(100.0).epsilon(1e-8));
    }
}

TEST_CASE("u_max never falls below the even split") {
    for (auto p : {UtilitySetPreset::AsymmetricLiteral, UtilitySetPreset::AsymmetricNormalized,
                   UtilitySetPreset::Symmetric}) {
        for (int k = 2; k <= 5; ++k) {
            const auto us = make_utilities(p, k);
            CHECK(u_max(us).value >= group_total(Allocation::even_split(k, k), us) - 1e-9);
        }
    }
}

TEST_CASE("a coarse grid oracle agrees with the optimizer") {
    for (auto p : {UtilitySetPreset::AsymmetricLiteral, UtilitySetPreset::Symmetric}) {
        const auto us = make_utilities(p, 3);
        const double opt = u_max(us).value;
        const auto g = grid_u_max(us, 5.0);
        CHECK(g.argmax.feasible());
        CHECK(g.polished_value >= g.grid_value);
        CHECK(g.polished_value <= opt + 1e-6);
        CHECK((opt - g.polished_value) / g.polished_value <= kCertificationTolerance);
    }
}

TEST_CASE("serial and parallel kernels agree") {
    UMaxOptions s, p;
    s.execution = Execution::Serial;
    p.execution = Execution::Parallel;
    CHECK(u_max(UtilitySetPreset::AsymmetricLiteral, 4, s).value == u_max(UtilitySetPreset::AsymmetricLiteral, 4, p).value);
    const auto us = make_utilities(UtilitySetPreset::Symmetric, 3);
    CHECK(grid_u_max(us, 5.0, Execution::Serial).polished_value == grid_u_max(us, 5.0, Execution::Parallel).polished_value);
}

TEST_CASE("proposals canonicalize to micro-units and reject infeasible tables") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 3);
    std::string why;
    const Json by_name = {{"A1", {50, 0, 0}}, {"A2", {25, 100, 0}}, {"A3", {25, 0, 100}}};
    const auto a = env.canonicalize(by_name, &why);
    REQUIRE(a);
    const auto b = env.canonicalize({{"allocation", {{50.0000001, 0, 0}, {25, 100, 0}, {24.9999999, 0, 100}}}}, &why);
    REQUIRE(b);
    CHECK(*a == *b);
    CHECK_FALSE(env.canonicalize({{"allocation", {{60, 0, 0}, {25, 100, 0}, {25, 0, 100}}}}, &why));
    CHECK_FALSE(why.empty());
    CHECK_FALSE(env.canonicalize({{"allocation", {{-5, 0, 0}, {55, 100, 0}, {50, 0, 100}}}}, &why));
    CHECK_FALSE(env.canonicalize(Json::array({1, 2}), &why));
    CHECK(EconomyEnvironment::allocation_of(*a).feasible());
}

TEST_CASE("selfish proposals hand everything to the proposer") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 3);
    const auto s = EconomyEnvironment::allocation_of(env.selfish_proposal(1));
    for (int g = 0; g < 3; ++g) CHECK(s.at(1, g) == doctest::Approx(100.0));
    CHECK(env.utility(1, env.selfish_proposal(1)) > env.utility(1, env.neutral_proposal()));
}

TEST_CASE("blending toward others stays feasible") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 3);
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        const auto from = env.random_proposal(rng);
        const auto mix = env.blend(from, {env.random_proposal(rng), env.random_proposal(rng)}, rng.uniform());
        CHECK(EconomyEnvironment::allocation_of(mix).feasible());
    }
    const auto x = env.random_proposal(rng);
    CHECK(env.blend(x, {}, 0.5) == x);
}

}  // TEST_SUITE
