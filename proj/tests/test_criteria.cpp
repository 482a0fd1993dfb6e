#include <cmath>

#include "doctest.h"
#include "plap/criteria.hpp"
#include "plap/error.hpp"

using namespace plap;
using namespace plap::criteria;

namespace {

std::vector<expr::Expression> in_r(std::initializer_list<std::string> sources) {
    std::vector<expr::Expression> out;
    for (const auto& s : sources) out.push_back(expr::parse(s, {"r"}));
    return out;
}

std::vector<expr::Expression> in_u(std::size_t m, std::initializer_list<std::string> sources) {
    std::vector<expr::Expression> out;
    for (const auto& s : sources) out.push_back(expr::parse(s, expr::state_variables(m)));
    return out;
}

std::string power_law(int gamma) { return "(1+r)^(-" + std::to_string(gamma) + ")"; }

constexpr auto D = VerdictKind::Diverges;
constexpr auto C = VerdictKind::ConvergesFinite;

}  // namespace

TEST_CASE("classify_improper_integral: examples") {
    const auto two = classify_improper_integral([](double t) { return 1.0 / (t * t); }, 1.0,
                                                kDefaultSamples);
    CHECK(two.kind == C);
    CHECK(two.tail_exponent_estimate == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(two.decided_by == Stage::TailExponent);

    const auto one = classify_improper_integral([](double t) { return 1.0 / t; }, 1.0,
                                                kDefaultSamples);
    CHECK(one.kind == D);
    CHECK(one.decided_by == Stage::WindowRatio);
    for (double inc : one.window_increments) CHECK(inc == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    const auto flat = classify_improper_integral(expr::parse("t^0", {"t"}), 1.0, kDefaultSamples);
    CHECK(flat.kind == D);
    CHECK(std::abs(flat.tail_exponent_estimate) < 1e-9);
}

TEST_CASE("classify_improper_integral: power-law oracle") {
    for (double alpha : {-3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 1.0}) {
        const auto v = classify_improper_integral([alpha](double t) { return std::pow(t, alpha); },
                                                  1.0, kDefaultSamples);
        INFO("alpha = " << alpha);
        CHECK(v.kind == (alpha >= -1.0 ? D : C));
    }
}

TEST_CASE("classify_improper_integral: borderline and degenerate integrands") {
    const auto log_sq = classify_improper_integral(
        [](double t) { return 1.0 / (t * std::pow(std::log(t + 1.0), 2.0)); }, 1.0, kDefaultSamples);
    CHECK(log_sq.kind != D);

    const auto expdecay = classify_improper_integral([](double t) { return std::exp(-t); }, 1.0,
                                                     kDefaultSamples);
    CHECK(expdecay.kind == C);

    const auto zero = classify_improper_integral([](double) { return 0.0; }, 1.0, kDefaultSamples);
    CHECK(zero.kind == C);
    CHECK(zero.degenerate);

    CHECK_THROWS_AS(classify_improper_integral([](double) { return -1.0; }, 1.0, kDefaultSamples),
                    NonPositiveIntegrand);
}

TEST_CASE("check_C3: examples") {
    CHECK(check_C3(in_u(1, {"u1^0.5"}), 1, 2.0).kind == D);
    CHECK(check_C3(in_u(1, {"u1^2"}), 1, 2.0).kind == C);
    const auto lin = check_C3(in_u(1, {"u1"}), 1, 2.0);
    CHECK(lin.kind == D);
    CHECK(lin.decided_by == Stage::WindowRatio);
    CHECK(check_C3(in_u(1, {"min(u1,1)"}), 1, 2.0).kind == D);
    CHECK(check_C3(in_u(1, {"exp(u1)-1"}), 1, 2.0).kind == C);
}

TEST_CASE("cond5, cond5b, cond13: examples") {
    CHECK(check_condition_5(in_r({"(1+r)^(-4)"}), 2.0, 0.5).kind == C);
    CHECK(check_condition_5(in_r({"(1+r)^(-4)"}), 2.0, 0.5).tail_exponent_estimate ==
          doctest::Approx(-2.5).epsilon(1e-3));
    CHECK(check_condition_5(in_r({"1"}), 2.0, 0.5).kind == D);
    CHECK(check_condition_5(in_r({"(1+r)^(-2)"}), 2.0, 0.5).kind == D);

    CHECK(check_condition_5b(in_r({"1"}), 2.0).kind == D);
    CHECK(check_condition_5b(in_r({"exp(-r)"}), 2.0).kind == C);
    CHECK(check_condition_5b(in_r({"(1+r)^(-3)"}), 2.0).kind == C);

    CHECK(check_condition_13(in_r({"1"}), 2.0, 1.0).kind == D);
    CHECK(check_condition_13(in_r({"(1+r)^(-4)"}), 2.0, 0.1).kind == C);
    CHECK(check_condition_13(in_r({"(1+r)^(-1)"}), 2.0, 0.1).kind == D);
}

TEST_CASE("cond12: examples") {
    const auto one = check_condition_12(in_r({"1"}), 3, 2.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].kind == D);
    CHECK(check_condition_12(in_r({"(1+r)^(-4)"}), 3, 2.0)[0].kind == C);
    const auto zero = check_condition_12(in_r({"0"}), 3, 2.0);
    CHECK(zero[0].kind == C);
    CHECK(zero[0].degenerate);

    const auto pair = check_condition_12(in_r({"1", "exp(-r)"}), 3, 2.0);
    REQUIRE(pair.size() == 2);
    CHECK(pair[0].kind == D);
    CHECK(pair[1].kind == C);
}

TEST_CASE("power-law battery: analytic verdicts") {
    // p=2, eps=0.5, N=3: tail exponents 1.5-γ for cond5/cond13, 1-γ for cond5b/cond12.
    for (int gamma = 0; gamma <= 4; ++gamma) {
        const auto a = in_r({power_law(gamma)});
        INFO("gamma = " << gamma);
        const auto c5 = check_condition_5(a, 2.0, 0.5);
        const auto c5b = check_condition_5b(a, 2.0);
        const auto c12 = check_condition_12(a, 3, 2.0)[0];
        const auto c13 = check_condition_13(a, 2.0, 0.5);
        CHECK(c5.kind == (gamma <= 2 ? D : C));
        CHECK(c13.kind == (gamma <= 2 ? D : C));
        CHECK(c5b.kind == (gamma <= 2 ? D : C));
        CHECK(c12.kind == (gamma <= 2 ? D : C));
        if (gamma == 2) {
            CHECK(c5b.decided_by == Stage::WindowRatio);
            CHECK(c12.decided_by == Stage::WindowRatio);
        }
    }
}

TEST_CASE("epsilon monotonicity of cond5 and mutual exclusion with cond5b") {
    for (int gamma = 0; gamma <= 4; ++gamma) {
        const auto a = in_r({power_law(gamma)});
        bool diverged = false, converged_somewhere = false;
        for (double eps : kEpsilonScan) {
            const auto v = check_condition_5(a, 2.0, eps);
            if (diverged) CHECK(v.kind == D);
            diverged = diverged || v.kind == D;
            converged_somewhere = converged_somewhere || v.kind == C;
        }
        CHECK_FALSE((converged_somewhere && check_condition_5b(a, 2.0).kind == D));
    }
}

TEST_CASE("C3 implications on a nonlinearity battery") {
    struct Case {
        std::size_t m;
        std::vector<std::string> f;
    };
    const std::vector<Case> battery{
        {1, {"u1^0.5"}}, {1, {"u1"}}, {1, {"u1^2"}}, {1, {"min(u1,1)"}},
        {2, {"u1^0.5*u2^0.5", "u1"}}, {2, {"u2^2", "u1^0.5"}}, {2, {"u1+u2", "u1^3"}},
    };
    for (double p : {2.0, 3.0}) {
        for (const auto& c : battery) {
            std::vector<expr::Expression> f;
            for (const auto& s : c.f) f.push_back(expr::parse(s, expr::state_variables(c.m)));
            const auto c3 = check_C3(f, c.m, p);
            if (c3.kind == D)
                for (const auto& fi : f) CHECK(check_component_integral(fi, c.m, p).kind == D);
            if (check_reciprocal_sum(f, c.m, p).kind == D) CHECK(c3.kind == D);
        }
    }
}

TEST_CASE("weight monotonicity") {
    const auto g = grid::make_grid(100.0, 2001);
    const auto decaying = check_weight_monotonicity(in_r({"(1+r)^(-4)"}), 2.0, 3, g);
    CHECK(decaying.eventually_monotone);
    CHECK(decaying.from_index == 0);
    CHECK(decaying.from_radius == 0.0);

    CHECK_FALSE(check_weight_monotonicity(in_r({"exp(-r)"}), 2.0, 3, g).eventually_monotone);

    const auto flat = check_weight_monotonicity(in_r({"1"}), 3.0, 5, g);
    CHECK(flat.eventually_monotone);
    CHECK(flat.from_index == 0);
}

TEST_CASE("predict: examples") {
    const auto bounded = predict(solver::make_problem(1, 2.0, 3, {"(1+r)^(-4)"}, {"u1^0.5"}), 0.5);
    CHECK(bounded.prediction == Prediction::BoundedExists);
    CHECK(bounded.bounded_exists_fires);

    const auto large = predict(solver::make_problem(1, 2.0, 3, {"1"}, {"min(u1,1)"}), 0.5);
    CHECK(large.prediction == Prediction::AllSolutionsLarge);
    CHECK(large.no_bounded_radial_fires);
    CHECK(large.all_solutions_large_fires);
    CHECK(large.cond5b.kind == D);
    CHECK(large.details.find("5b") != std::string::npos);

    const auto sub = predict(solver::make_problem(1, 2.0, 3, {"1"}, {"u1^0.5"}), 0.5);
    CHECK(sub.prediction == Prediction::AllSolutionsLarge);

    const auto zero = predict(solver::make_problem(1, 2.0, 3, {"0"}, {"u1"}), 0.5);
    CHECK(zero.prediction == Prediction::Inconclusive);
    CHECK(zero.degenerate_coefficients);

    const auto bad = predict(solver::make_problem(1, 2.0, 3, {"1"}, {"u1 - 1"}), 0.5);
    CHECK(bad.hypotheses_violated);
    CHECK(bad.prediction == Prediction::Inconclusive);
}
