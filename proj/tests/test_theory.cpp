#include <doctest.h>

#include <cmath>
#include <sstream>

#include "treequery/theory.hpp"

using namespace treequery;

namespace {

ReliabilityParams params_for(int stages, int experts, double alpha) {
    ReliabilityParams p;
    p.stages = stages;
    p.experts = experts;
    p.alpha = alpha;
    return p;
}

} // namespace

TEST_CASE("the pairwise bound matches a direct evaluation") {
    const double got = pairwise_bound(params_for(4, 101, 0.3));
    CHECK(got == doctest::Approx(0.998761).epsilon(1e-6));
    const double direct = 1.0 - 4.0 * std::exp(-2.0 * 101 * 0.2 * 0.2);
    CHECK(got == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("vacuous bounds clamp to zero") {
    CHECK(pairwise_bound(params_for(4, 101, 0.5)) == 0.0);
    CHECK(pairwise_bound(params_for(4, 1, 0.0)) == 0.0); // 1 - 4/e^0.5 < 0
    CHECK(pairwise_bound(params_for(1, 3, 0.45)) > 0.0);
}

TEST_CASE("the bound is monotone in panel size and error rate") {
    for (double alpha : {0.0, 0.1, 0.2, 0.3, 0.4, 0.45}) {
        double prev = -1.0;
        for (int m = 1; m <= 200; ++m) {
            const double b = pairwise_bound(params_for(4, m, alpha));
            CHECK(b >= prev);
            prev = b;
        }
    }
    for (int m : {5, 55, 101}) {
        double prev = 2.0;
        for (double alpha : {0.0, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49}) {
            const double b = pairwise_bound(params_for(4, m, alpha));
            CHECK(b <= prev);
            prev = b;
        }
    }
}

TEST_CASE("expected edges scale the pairwise bound") {
    auto p = params_for(4, 101, 0.3);
    p.edges = 0.0;
    CHECK(expected_edges(p) == 0.0);
    p.edges = 10.0;
    CHECK(expected_edges(p) == doctest::Approx(9.98761).epsilon(1e-4));
    p.edges = 1.0;
    CHECK(expected_edges(p) == pairwise_bound(p));
}

TEST_CASE("the worked panel-size example comes out to 55") {
    CHECK(required_experts(0.95, 4, 0.3) == 55);
    CHECK(pairwise_bound(params_for(4, 55, 0.3)) >= 0.95);
    CHECK(pairwise_bound(params_for(4, 54, 0.3)) < 0.95);
}

TEST_CASE("required experts is the minimal panel size on a grid") {
    for (double target : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        for (int stages : {1, 4, 9}) {
            for (double alpha : {0.1, 0.25, 0.3, 0.4}) {
                const int m = required_experts(target, stages, alpha);
                CHECK(m >= 1);
                CHECK(pairwise_bound(params_for(stages, m, alpha)) >= target - 1e-9);
                if (m > 1) {
                    CHECK(pairwise_bound(params_for(stages, m - 1, alpha)) < target + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("tiny targets clamp to a single expert") {
    CHECK(required_experts(1e-9, 1, 0.3) == 1);
}

TEST_CASE("reliability inputs are validated") {
    CHECK_THROWS_AS(required_experts(0.95, 4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(required_experts(0.95, 4, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(required_experts(0.0, 4, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(required_experts(1.0, 4, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(required_experts(0.95, 0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(validate(params_for(4, 0, 0.3)), std::invalid_argument);
    CHECK_THROWS_AS(validate(params_for(0, 5, 0.3)), std::invalid_argument);
    CHECK_THROWS_AS(validate(params_for(4, 5, 0.6)), std::invalid_argument);
    auto bad = params_for(4, 5, 0.3);
    bad.edges = -1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = params_for(4, 5, 0.3);
    bad.target = 1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("noiseless trials are always correct") {
    auto r = monte_carlo_identifiability(Relation::Forward, params_for(4, 5, 0.0), 50, 7);
    CHECK(r.trials == 50);
    CHECK(r.correct == 50);
    CHECK(r.empirical == 1.0);
    CHECK(r.std_error == 0.0);
    CHECK(r.mean_confidence == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every relation beats its bound under noise") {
    const auto params = params_for(4, 21, 0.3);
    const double bound = pairwise_bound(params);
    auto nine = params_for(9, 21, 0.3);
    const double bound9 = pairwise_bound(nine);
    for (Relation truth : {Relation::Independent, Relation::Latent, Relation::Forward,
                           Relation::Backward}) {
        auto r = monte_carlo_identifiability(truth, params, 400, 11);
        CHECK(r.empirical >= bound - 3.0 * r.std_error);
        CHECK(r.empirical >= bound9 - 3.0 * r.std_error);
        CHECK(r.empirical > 0.5);
    }
}

TEST_CASE("a large panel tracks the tight bound") {
    const auto params = params_for(4, 101, 0.3);
    auto r = monte_carlo_identifiability(Relation::Forward, params, 1500, 3, 4);
    CHECK(r.empirical >= 0.998761 - 3.0 * r.std_error);
}

TEST_CASE("trial estimates do not depend on the job count") {
    const auto params = params_for(4, 11, 0.25);
    auto serial = monte_carlo_identifiability(Relation::Latent, params, 300, 21, 1);
    auto parallel = monte_carlo_identifiability(Relation::Latent, params, 300, 21, 4);
    CHECK(serial.correct == parallel.correct);
    CHECK(serial.empirical == parallel.empirical);
    CHECK(serial.mean_confidence == parallel.mean_confidence);
}

TEST_CASE("the adversarial mode reports confidence without changing the contract") {
    AceParams ace;
    ace.m = 5;
    ace.runs = 3;
    ace.personas = 3;
    const auto params = params_for(4, 5, 0.3);
    auto r = monte_carlo_identifiability(Relation::Forward, params, 60, 17, 2, &ace);
    CHECK(r.trials == 60);
    CHECK(r.empirical >= 0.0);
    CHECK(r.empirical <= 1.0);
    CHECK(r.mean_confidence >= 0.0);
    CHECK(r.mean_confidence <= 1.0);
    auto again = monte_carlo_identifiability(Relation::Forward, params, 60, 17, 1, &ace);
    CHECK(r.correct == again.correct);
    CHECK(r.mean_confidence == again.mean_confidence);
}

TEST_CASE("monte carlo inputs are validated") {
    const auto params = params_for(4, 5, 0.3);
    CHECK_THROWS_AS(monte_carlo_identifiability(Relation::Forward, params, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_identifiability(Relation::Unknown, params, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_identifiability(Relation::Forward, params, 10, 1, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_identifiability(Relation::Forward, params_for(4, 5, 0.6), 10, 1),
                    std::invalid_argument);
}

TEST_CASE("sweeps cover the grid and reuse estimates across stage counts") {
    SweepSpec spec;
    spec.experts = {5, 21};
    spec.alphas = {0.0, 0.3};
    spec.stages = {4, 9};
    spec.trials = 100;
    auto rows = run_sweep(spec, 42, 2);
    REQUIRE(rows.size() == 2 * 2 * 2 * 4);

    for (const auto& row : rows) {
        CHECK(row.bound ==
              pairwise_bound(params_for(row.stages, row.experts, row.alpha)));
        if (row.alpha == 0.0) CHECK(row.empirical == 1.0);
    }
    // Same (m, alpha, relation) at different stage counts shares one estimate.
    for (const auto& a : rows) {
        for (const auto& b : rows) {
            if (a.experts == b.experts && a.alpha == b.alpha && a.relation == b.relation) {
                CHECK(a.empirical == b.empirical);
                CHECK(a.std_error == b.std_error);
            }
        }
    }

    auto again = run_sweep(spec, 42, 1);
    CHECK(sweep_csv(rows) == sweep_csv(again));
}

TEST_CASE("the sweep csv is line per row with a fixed header") {
    SweepSpec spec;
    spec.experts = {5};
    spec.alphas = {0.2};
    spec.stages = {4};
    spec.trials = 20;
    spec.relations = {Relation::Forward};
    auto rows = run_sweep(spec, 1, 1);
    REQUIRE(rows.size() == 1);
    const std::string csv = sweep_csv(rows);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "m,alpha,M,trials,relation,bound,empirical,stderr");
    std::string body;
    std::getline(lines, body);
    CHECK(body.rfind("5,0.2,4,20,->,", 0) == 0);
}

TEST_CASE("sweep specs parse from json") {
    auto spec = sweep_from_json(
        nlohmann::json::parse(R"({"m": 5, "alpha": [0.1, 0.3], "M": [4], "trials": 10})"));
    CHECK(spec.experts == std::vector<int>{5});
    CHECK(spec.alphas.size() == 2);
    CHECK(spec.relations.empty());

    auto narrowed = sweep_from_json(nlohmann::json::parse(
        R"({"m": [5], "alpha": [0.1], "M": [4], "trials": 10, "relations": ["->"]})"));
    REQUIRE(narrowed.relations.size() == 1);
    CHECK(narrowed.relations[0] == Relation::Forward);

    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(
                        R"({"m": [], "alpha": [0.1], "M": [4], "trials": 10})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(
                        R"({"m": [5], "alpha": [0.5], "M": [4], "trials": 10})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(
                        R"({"m": [5], "alpha": [0.1], "M": [4], "trials": 0})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(
                        R"({"m": [5], "alpha": [0.1], "M": [4], "trials": 10, "relations": ["unknown"]})")),
                    std::invalid_argument);
}
