#include <cmath>

#include "doctest.h"
#include "plap/error.hpp"
#include "plap/solver.hpp"
#include "plap/verify.hpp"

using namespace plap;
using namespace plap::solver;
using verify::GrowthKind;

namespace {

ProblemSpec linear(double beta = 1.0) { return make_problem(1, 2.0, 3, {"1"}, {"u1"}, beta); }

}  // namespace

TEST_CASE("fixed_point_residual: examples") {
    const auto g = grid::make_grid(10.0, 4001);
    const auto zero = make_problem(1, 2.0, 3, {"0"}, {"u1"}, 0.7);
    const auto r0 = verify::fixed_point_residual(zero, g, ProfileSet::constant(g, 1, 0.7));
    CHECK(r0.sup_fixed_point_residual == 0.0);
    CHECK(r0.sup_ode_residual_interior == 0.0);

    const auto solved = solve_radial_system(linear(), g, {});
    const auto r1 = verify::fixed_point_residual(linear(), g, solved.profiles);
    CHECK(r1.sup_fixed_point_residual <= 1e-6);

    // One step gives β(1 + r²/6); the next adds β r⁴/120, largest at r_max.
    const auto w1 = picard_step(linear(), g, ProfileSet::constant(g, 1, 1.0));
    const auto r2 = verify::fixed_point_residual(linear(), g, w1);
    CHECK(r2.sup_fixed_point_residual == doctest::Approx(1e4 / 120.0).epsilon(1e-6));
    CHECK(r2.node_of_max == g.size() - 1);
}

TEST_CASE("ODE residual is second order for the linear oracle") {
    auto ode = [](std::size_t points) {
        const auto g = grid::make_grid(10.0, points);
        const auto s = solve_radial_system(linear(), g, {});
        return verify::fixed_point_residual(linear(), g, s.profiles).sup_ode_residual_interior;
    };
    const double a = ode(1001), b = ode(2001), c = ode(4001);
    CHECK(a / b >= 3.0);
    CHECK(b / c >= 3.0);
}

TEST_CASE("converged solves have small fixed-point residuals") {
    const auto g = grid::make_grid(8.0, 1601);
    const std::vector<ProblemSpec> problems{
        linear(),
        make_problem(1, 3.0, 4, {"1"}, {"u1"}, 0.1),
        make_problem(1, 2.0, 3, {"(1+r)^(-4)"}, {"u1^0.5"}),
        make_problem(2, 2.5, 5, {"exp(-r)", "1/(1+r)"}, {"u1^0.5*u2^0.5", "min(u1,1)+u2"}),
    };
    IterationConfig cfg;
    for (const auto& p : problems) {
        const auto s = solve_radial_system(p, g, cfg);
        REQUIRE(s.report.converged);
        const auto r = verify::fixed_point_residual(p, g, s.profiles);
        CHECK(r.sup_fixed_point_residual <= 10.0 * (cfg.abs_tol + cfg.rel_tol * s.profiles.sup()));
    }
}

TEST_CASE("check_monotone_in_k") {
    const auto g = grid::make_grid(10.0, 1001);
    IterationConfig cfg;
    cfg.record_history = true;
    auto run = solve_radial_system(linear(), g, cfg);
    CHECK_FALSE(verify::check_monotone_in_k(run.history).has_value());

    const auto zero = solve_radial_system(make_problem(1, 2.0, 3, {"0"}, {"u1"}), g, cfg);
    CHECK_FALSE(verify::check_monotone_in_k(zero.history).has_value());

    REQUIRE(run.history.size() > 5);
    run.history[4].profiles[0][300] = run.history[3].profiles[0][300] - 1e-3;
    const auto v = verify::check_monotone_in_k(run.history);
    REQUIRE(v.has_value());
    CHECK(v->iteration == 4);
    CHECK(v->component == 0);
    CHECK(v->node == 300);
    CHECK(v->magnitude > 0.0);
}

TEST_CASE("classify_growth: oracles") {
    const auto sub = verify::classify_growth(make_problem(1, 2.0, 3, {"1"}, {"u1^0.5"}, 1.0), 5.0, 4, {});
    CHECK(sub.classification == GrowthKind::Growing);
    CHECK(sub.exponent_estimate == doctest::Approx(4.0).epsilon(0.3 / 4.0));

    const auto p3 = verify::classify_growth(make_problem(1, 3.0, 4, {"1"}, {"u1"}, 1.0), 5.0, 4, {});
    CHECK(p3.classification == GrowthKind::Growing);
    CHECK(p3.exponent_estimate == doctest::Approx(3.0).epsilon(0.3 / 3.0));

    const auto bounded =
        verify::classify_growth(make_problem(1, 2.0, 3, {"(1+r)^(-4)"}, {"u1^0.5"}), 40.0, 4, {});
    CHECK(bounded.classification == GrowthKind::Saturating);

    const auto zero = verify::classify_growth(make_problem(1, 2.0, 3, {"0"}, {"u1"}), 5.0, 3, {}, 201);
    CHECK(zero.classification == GrowthKind::Saturating);

    const auto lin = verify::classify_growth(linear(), 5.0, 4, {}, 1001);
    CHECK(lin.classification == GrowthKind::Growing);
    CHECK(std::isinf(lin.exponent_estimate));

    for (const auto* rep : {&sub, &p3, &bounded, &zero, &lin}) {
        CHECK(rep->domain_radii.size() == rep->sup_values.size());
        for (std::size_t k = 1; k < rep->sup_values.size(); ++k)
            CHECK(rep->sup_values[k] >= rep->sup_values[k - 1]);
    }

    CHECK_THROWS_AS(verify::classify_growth(linear(), 5.0, 1, {}), InvalidArgument);
}
