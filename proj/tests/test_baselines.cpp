#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ccbo/baselines.hpp"
#include "ccbo/bo.hpp"
#include "ccbo/rng.hpp"

#include <cmath>
#include <vector>

using namespace ccbo;
using namespace ccbo::baselines;

namespace {

Problem quadratic_1d(double minimizer) {
    Problem p;
    p.id = "quad-1d";
    p.domain = Domain(VectorXd::Zero(1), VectorXd::Ones(1));
    p.evaluator = [minimizer](const VectorXd& theta) {
        EvalResult r;
        r.objective = (theta[0] - minimizer) * (theta[0] - minimizer);
        return r;
    };
    return p;
}

Problem bowl_2d() {
    Problem p;
    p.id = "bowl-2d";
    p.domain = Domain(VectorXd::Constant(2, -2.0), VectorXd::Constant(2, 2.0));
    p.evaluator = [](const VectorXd& theta) {
        EvalResult r;
        r.objective = theta.squaredNorm();
        return r;
    };
    return p;
}

bool in_domain(const Trace& trace, const Domain& domain) {
    for (const auto& ev : trace.evaluations)
        if (!domain.contains(ev.theta, 1e-12)) return false;
    return true;
}

}  // namespace

TEST_CASE("random search spends the full budget on in-box points") {
    const Problem p = bowl_2d();
    const Trace trace = random_search(p, 50, 11, MatrixXd(0, 2));
    CHECK(trace.evaluations.size() == 50);
    CHECK(trace.optimizer_id == "Rand");
    CHECK(in_domain(trace, p.domain));
}

TEST_CASE("random search is deterministic and honors the shared initial design") {
    const Problem p = bowl_2d();
    const MatrixXd design = bo::initial_design(2, std::uint64_t{5});
    const Trace a = random_search(p, 20, 7, design);
    const Trace b = random_search(p, 20, 7, design);
    REQUIRE(a.evaluations.size() == b.evaluations.size());
    for (std::size_t i = 0; i < a.evaluations.size(); ++i)
        CHECK(a.evaluations[i].theta == b.evaluations[i].theta);
    for (int i = 0; i < design.rows(); ++i) {
        const VectorXd expected = denormalize(p.domain, design.row(i).transpose());
        CHECK((a.evaluations[static_cast<std::size_t>(i)].theta - expected).norm() == 0.0);
    }
}

TEST_CASE("grid sizing covers the evaluation budget with the fewest levels") {
    CHECK(grid_levels(5) == 3);
    CHECK(grid_levels(2) == 8);
    CHECK(grid_levels(3) == 5);
    CHECK(grid_levels(4) == 4);  // ceil(100^(1/4)) = ceil(3.16)
    for (int d = 2; d <= 6; ++d) {
        const int L = grid_levels(d);
        CHECK(std::pow(static_cast<double>(L), d) >= 25.0 * d);
        CHECK(std::pow(static_cast<double>(L - 1), d) < 25.0 * d);
    }
}

TEST_CASE("the alternative log sizing yields fewer levels in low dimensions") {
    CHECK(grid_levels(2, true) == 6);   // ceil(log2 50)
    CHECK(grid_levels(5, true) == 3);   // log5 125 exactly
    CHECK(grid_levels(2, true) < grid_levels(2, false));
}

TEST_CASE("grid sizing rejects one-dimensional problems") {
    CHECK_THROWS_AS(grid_levels(1), DomainError);
    CHECK_THROWS_AS(grid_levels(1, true), DomainError);
}

TEST_CASE("grid search enumerates the full factorial lattice in fixed order") {
    const Problem p = bowl_2d();
    const int levels = 8;
    const Trace trace = grid_search(p, levels, 3);
    REQUIRE(trace.evaluations.size() == 64);
    CHECK(trace.optimizer_id == "Grid");
    CHECK(in_domain(trace, p.domain));

    // last coordinate varies fastest; first block keeps theta[0] at the lower bound
    for (int i = 0; i < levels; ++i) {
        const VectorXd& theta = trace.evaluations[static_cast<std::size_t>(i)].theta;
        CHECK(theta[0] == doctest::Approx(-2.0).epsilon(1e-14));
        CHECK(theta[1] == doctest::Approx(-2.0 + 4.0 * i / (levels - 1)).epsilon(1e-12));
    }
    const VectorXd& second_block = trace.evaluations[static_cast<std::size_t>(levels)].theta;
    CHECK(second_block[0] == doctest::Approx(-2.0 + 4.0 / (levels - 1)).epsilon(1e-12));
    CHECK(second_block[1] == doctest::Approx(-2.0).epsilon(1e-14));

    // endpoints included: the final point is the upper corner
    const VectorXd& last = trace.evaluations.back().theta;
    CHECK(last[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(last[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("grid search hits a minimum located exactly on a lattice node") {
    // 5 levels on [-2,2]: nodes at -2,-1,0,1,2; the bowl's minimum (0,0) is one
    const Trace trace = grid_search(bowl_2d(), 5, 3);
    const auto inc = incumbent(trace);
    REQUIRE(inc.has_value());
    CHECK(inc->objective == 0.0);
}

TEST_CASE("grid search refuses degenerate and oversized lattices") {
    CHECK_THROWS_AS(grid_search(bowl_2d(), 1, 3), DomainError);
    CHECK_THROWS_AS(grid_search(bowl_2d(), 4000, 3), DomainError);  // 16e6 nodes
}

TEST_CASE("pattern search converges on a one-dimensional quadratic") {
    const Problem p = quadratic_1d(0.3);
    const Trace trace = pattern_search(p, 50, 21, MatrixXd(0, 1));
    CHECK(trace.evaluations.size() == 50);
    const auto inc = incumbent(trace);
    REQUIRE(inc.has_value());
    CHECK(std::abs(inc->theta[0] - 0.3) < 1e-3);
}

TEST_CASE("pattern search halves the mesh after each failed polling round") {
    // Start exactly at the minimizer: every poll fails, so the mesh contracts
    // by 2 each round and is a quarter of its start value after two rounds.
    const Problem p = quadratic_1d(0.5);
    MatrixXd start(1, 1);
    start << 0.5;
    std::vector<PatternRound> rounds;
    const Trace trace = pattern_search(p, 7, 5, start, "PS", &rounds);
    CHECK(trace.evaluations.size() == 7);
    REQUIRE(rounds.size() >= 3);
    CHECK(rounds[0].mesh == doctest::Approx(0.25));
    CHECK_FALSE(rounds[0].improved);
    CHECK(rounds[1].mesh == doctest::Approx(0.125));
    CHECK(rounds[2].mesh == doctest::Approx(0.0625));
    CHECK(rounds[2].mesh == doctest::Approx(rounds[0].mesh * 0.25));
}

TEST_CASE("pattern search expands the mesh while it keeps improving") {
    const Problem p = quadratic_1d(1.0);  // minimum at the upper boundary
    MatrixXd start(1, 1);
    start << 0.01;
    std::vector<PatternRound> rounds;
    pattern_search(p, 30, 5, start, "PS", &rounds);
    REQUIRE(rounds.size() >= 2);
    CHECK(rounds[0].improved);
    CHECK(rounds[1].mesh == doctest::Approx(0.5));  // doubled after a successful round
}

TEST_CASE("pattern search keeps every candidate inside the box") {
    const Problem p = bowl_2d();
    const Trace trace = pattern_search(p, 60, 33, MatrixXd(0, 2));
    CHECK(in_domain(trace, p.domain));
}

TEST_CASE("pattern search is deterministic for a fixed seed") {
    const Problem p = bowl_2d();
    const Trace a = pattern_search(p, 40, 13, MatrixXd(0, 2));
    const Trace b = pattern_search(p, 40, 13, MatrixXd(0, 2));
    REQUIRE(a.evaluations.size() == b.evaluations.size());
    for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
        CHECK(a.evaluations[i].theta == b.evaluations[i].theta);
        CHECK(a.evaluations[i].objective == b.evaluations[i].objective);
    }
}

TEST_CASE("crashed evaluations never become the pattern-search incumbent") {
    Problem p;
    p.id = "cliff";
    p.domain = Domain(VectorXd::Zero(1), VectorXd::Ones(1));
    p.evaluator = [](const VectorXd& theta) {
        EvalResult r;
        if (theta[0] < 0.7) {  // the tempting low region crashes
            r.crashed = true;
            r.fallback_objective = 100.0;
            return r;
        }
        r.objective = (theta[0] - 0.8) * (theta[0] - 0.8);
        return r;
    };

    MatrixXd start(2, 1);
    start << 0.75, 0.9;
    const Trace trace = pattern_search(p, 40, 17, start);
    const auto inc = incumbent(trace);
    REQUIRE(inc.has_value());
    CHECK(inc->theta[0] >= 0.7);
    CHECK(std::abs(inc->theta[0] - 0.8) < 5e-3);
}

TEST_CASE("pattern search restarts randomly when the whole initial design crashed") {
    Problem p;
    p.id = "mostly-crashed";
    p.domain = Domain(VectorXd::Zero(1), VectorXd::Ones(1));
    p.evaluator = [](const VectorXd& theta) {
        EvalResult r;
        if (theta[0] < 0.7) {
            r.crashed = true;
            return r;
        }
        r.objective = (theta[0] - 0.8) * (theta[0] - 0.8);
        return r;
    };

    MatrixXd start(2, 1);
    start << 0.1, 0.3;  // both crash
    const Trace trace = pattern_search(p, 60, 19, start);
    CHECK(trace.evaluations[0].crashed);
    CHECK(trace.evaluations[1].crashed);
    const auto inc = incumbent(trace);
    REQUIRE(inc.has_value());  // a restart found feasible ground
    CHECK(std::abs(inc->theta[0] - 0.8) < 1e-2);
    CHECK(trace.evaluations.size() == 60);
}

TEST_CASE("baseline sizes respect a budget smaller than the design") {
    const Problem p = bowl_2d();
    const MatrixXd design = bo::initial_design(2, std::uint64_t{5});
    CHECK(random_search(p, 2, 7, design).evaluations.size() == 2);
    CHECK(pattern_search(p, 2, 7, design).evaluations.size() == 2);
}
