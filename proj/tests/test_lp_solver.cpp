#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "gbas/errors.hpp"
#include "gbas/lp_solver.hpp"
#include "brute_force.hpp"

using namespace gbas;

TEST_CASE("hand-sized programs")
{
    lp::LinearProgram lp;
    lp.objective = {2.0, 1.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {1.0, 1.0};
    lp.add_row({-1.0, -1.0}, -1.0);
    const auto out = lp::solve(lp);
    REQUIRE(out.optimal());
    CHECK(out.x[0] == doctest::Approx(0.0));
    CHECK(out.x[1] == doctest::Approx(1.0));
    CHECK(out.objective == doctest::Approx(1.0));

    lp::LinearProgram bad;
    bad.objective = {1.0};
    bad.lower = {0.0};
    bad.upper = {1.0};
    bad.add_row({-1.0}, -2.0);
    CHECK(lp::solve(bad).status == lp::LpStatus::infeasible);

    lp::LinearProgram bounds_only;
    bounds_only.objective = {1.0, -1.0};
    bounds_only.lower = {0.5, 0.0};
    bounds_only.upper = {2.0, 3.0};
    const auto b = lp::solve(bounds_only);
    REQUIRE(b.optimal());
    CHECK(b.x[0] == doctest::Approx(0.5));
    CHECK(b.x[1] == doctest::Approx(3.0));
}

TEST_CASE("malformed programs")
{
    lp::LinearProgram lp;
    lp.objective = {1.0, 1.0};
    lp.lower = {0.0};
    lp.upper = {1.0, 1.0};
    CHECK_THROWS_AS(lp.validate(), NumericalFailure);
    lp.lower = {0.0, 2.0};
    CHECK_THROWS_AS(lp.validate(), NumericalFailure);
    lp.lower = {0.0, 0.0};
    lp.rows.push_back({1.0});
    lp.rhs.push_back(1.0);
    CHECK_THROWS_AS(lp::solve(lp), NumericalFailure);
}

TEST_CASE("solver agrees with vertex enumeration on random programs")
{
    std::mt19937 rng(20240917);
    int infeasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto lp = oracle::random_lp(rng, trial % 5 == 4);
        CAPTURE(trial);
        const auto ref = oracle::enumerate_vertices(lp);
        const auto out = lp::solve(lp);
        REQUIRE(out.optimal() == ref.feasible);
        if (!ref.feasible) {
            ++infeasible;
            continue;
        }
        CHECK(std::abs(out.objective - ref.objective) <= 1e-8 * std::max(1.0, std::abs(ref.objective)));
        CHECK(lp::max_violation(lp, out.x) <= 1e-9);
    }
    CHECK(infeasible == 40);
}

TEST_CASE("tableau dump")
{
    lp::LinearProgram lp;
    lp.objective = {1.0, 2.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {1.0, 1.0};
    lp.add_row({1.0, -1.0}, 0.5);
    std::ostringstream os;
    lp::write_tableau(os, lp);
    const auto text = os.str();
    CHECK(text.rfind("LP 2 1", 0) == 0);
    CHECK(text.find("r0 ") != std::string::npos);
    CHECK(text.find("<=") != std::string::npos);
}
