#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plap/error.hpp"

namespace plap::solver {

namespace {

const std::vector<std::string> kRadialVariable{"r"};

void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidProblem(message);
}

void check_variables(const std::vector<expr::Expression>& exprs,
                     const std::vector<std::string>& expected, const char* what) {
    for (const auto& e : exprs)
        require(e.variables() == expected,
                std::string(what) + " '" + e.source() + "' is declared over the wrong variables");
}

std::vector<double> sample_coefficient(const expr::Expression& a, const grid::RadialGrid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = a(grid[k]);
    return out;
}

}  // namespace

void ProblemSpec::validate() const {
    require(m >= 1, "m must be at least 1");
    require(p > 1.0 && std::isfinite(p), "p must exceed 1");
    require(static_cast<double>(N) - 1.0 >= p, "N - 1 >= p is required");
    require(beta > 0.0 && std::isfinite(beta), "beta must be positive");
    require(coefficients.size() == m, "coefficients must have m entries");
    require(nonlinearities.size() == m, "nonlinearities must have m entries");
    check_variables(coefficients, kRadialVariable, "coefficient");
    check_variables(nonlinearities, expr::state_variables(m), "nonlinearity");
    if (coefficients_lower) {
        require(coefficients_lower->size() == m, "coefficients_lower must have m entries");
        check_variables(*coefficients_lower, kRadialVariable, "lower coefficient");
    }
}

ProblemSpec make_problem(std::size_t m, double p, int N,
                         const std::vector<std::string>& coefficients,
                         const std::vector<std::string>& nonlinearities, std::optional<double> beta,
                         const std::optional<std::vector<std::string>>& coefficients_lower) {
    ProblemSpec problem;
    problem.m = m;
    problem.p = p;
    problem.N = N;
    problem.beta = beta.value_or(1.0 / static_cast<double>(m));
    for (const auto& s : coefficients) problem.coefficients.push_back(expr::parse(s, {"r"}));
    for (const auto& s : nonlinearities)
        problem.nonlinearities.push_back(expr::parse(s, expr::state_variables(m)));
    if (coefficients_lower) {
        problem.coefficients_lower.emplace();
        for (const auto& s : *coefficients_lower)
            problem.coefficients_lower->push_back(expr::parse(s, {"r"}));
    }
    problem.validate();
    return problem;
}

void IterationConfig::validate(double beta) const {
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
    if (!(value_cap > beta)) throw InvalidArgument("value_cap must exceed beta");
}

ProfileSet ProfileSet::constant(const grid::RadialGrid& grid, std::size_t m, double value) {
    return {grid, std::vector<std::vector<double>>(m, std::vector<double>(grid.size(), value))};
}

double ProfileSet::sup() const noexcept {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& u : profiles)
        for (double v : u) s = std::max(s, std::abs(v));
    return s;
}

DiscreteSystem discretize(const ProblemSpec& problem, const grid::RadialGrid& grid,
                          bool use_lower_coefficients) {
    problem.validate();
    const auto& coefficients = use_lower_coefficients && problem.coefficients_lower
                                   ? *problem.coefficients_lower
                                   : problem.coefficients;
    DiscreteSystem system{problem.m, problem.p, problem.N, problem.beta, {}, {}};
    for (const auto& a : coefficients) system.coefficient.push_back(sample_coefficient(a, grid));
    system.nonlinearity = [fs = problem.nonlinearities](std::span<const double> state,
                                                         std::span<double> out) {
        for (std::size_t i = 0; i < fs.size(); ++i) out[i] = fs[i](state);
    };
    return system;
}

RadialOperator::RadialOperator(DiscreteSystem system, const grid::RadialGrid& grid)
    : system_(std::move(system)), grid_(grid), weights_(grid, system_.N) {
    for (const auto& c : system_.coefficient)
        if (c.size() != grid.size()) throw InvalidArgument("coefficient samples do not match grid");
}

ProfileSet RadialOperator::apply(const ProfileSet& current, int iteration) const {
    const std::size_t m = system_.m;
    const std::size_t n = grid_.size();
    if (current.components() != m) throw InvalidArgument("profile count does not match m");

    std::vector<std::vector<double>> forcing(m, std::vector<double>(n));
    std::vector<double> state(m), f(m);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < m; ++i) state[i] = current.profiles[i][k];
        try {
            system_.nonlinearity(state, f);
        } catch (const DomainError& e) {
            throw e.at_iteration(iteration);
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double a = system_.coefficient[i][k];
            forcing[i][k] = a == 0.0 ? 0.0 : a * f[i];
        }
    }

    const double exponent = 1.0 / (system_.p - 1.0);
    const bool linear = system_.p == 2.0;
    ProfileSet next{grid_, std::vector<std::vector<double>>(m, std::vector<double>(n))};
    std::vector<double> inner(n), slope(n);
    for (std::size_t i = 0; i < m; ++i) {
        weights_.inner_integral(forcing[i], inner);
        for (std::size_t k = 0; k < n; ++k) {
            const double v = std::max(inner[k], 0.0);
            slope[k] = linear ? v : std::pow(v, exponent);
        }
        auto& u = next.profiles[i];
        grid::cumulative_integral(grid_.nodes(), slope, u);
        for (std::size_t k = 0; k < n; ++k) {
            u[k] += system_.beta;
            if (!std::isfinite(u[k])) throw NonFiniteValue(iteration, i, k);
        }
    }
    return next;
}

SolveResult RadialOperator::iterate(const IterationConfig& config) const {
    config.validate(system_.beta);
    SolveResult result{ProfileSet::constant(grid_, system_.m, system_.beta), {}, {}};
    SolveReport& report = result.report;
    if (config.record_history) result.history.push_back(result.profiles);

    for (int k = 1; k <= config.max_iterations; ++k) {
        std::optional<ProfileSet> attempt;
        try {
            attempt = apply(result.profiles, k);
        } catch (const NonFiniteValue&) {
            // An iterate that overflows has exceeded any finite cap.
            report.iterations_used = k;
            report.capped = true;
            break;
        }
        ProfileSet next = std::move(*attempt);
        double delta = 0.0;
        for (std::size_t i = 0; i < system_.m; ++i) {
            const auto& prev = result.profiles.profiles[i];
            const auto& cur = next.profiles[i];
            for (std::size_t node = 0; node < cur.size(); ++node) {
                const double diff = cur[node] - prev[node];
                delta = std::max(delta, std::abs(diff));
                const double slack = kMonotoneSlack * (1.0 + std::abs(prev[node]));
                if (!report.monotone_in_k_violation && diff < -slack)
                    report.monotone_in_k_violation = MonotoneViolation{k, i, node, -diff};
            }
        }
        report.sup_deltas.push_back(delta);
        report.iterations_used = k;
        result.profiles = std::move(next);
        if (config.record_history) result.history.push_back(result.profiles);

        const double sup = result.profiles.sup();
        if (sup > config.value_cap) {
            report.capped = true;
            break;
        }
        if (delta <= config.abs_tol + config.rel_tol * sup) {
            report.converged = true;
            break;
        }
    }

    if (report.capped) {
        report.final_residual = std::numeric_limits<double>::quiet_NaN();
    } else {
        const ProfileSet image = apply(result.profiles, report.iterations_used + 1);
        double residual = 0.0;
        for (std::size_t i = 0; i < system_.m; ++i)
            for (std::size_t node = 0; node < grid_.size(); ++node)
                residual = std::max(residual, std::abs(image.profiles[i][node] -
                                                       result.profiles.profiles[i][node]));
        report.final_residual = residual;
    }
    return result;
}

ProfileSet picard_step(const ProblemSpec& problem, const grid::RadialGrid& grid,
                       const ProfileSet& current) {
    if (!current.grid.same_nodes(grid)) throw InvalidArgument("profiles live on a different grid");
    return RadialOperator(discretize(problem, grid), grid).apply(current, 1);
}

SolveResult solve_radial_system(const ProblemSpec& problem, const grid::RadialGrid& grid,
                                const IterationConfig& config) {
    return RadialOperator(discretize(problem, grid), grid).iterate(config);
}

AuxiliaryResult solve_auxiliary_scalar(const ProblemSpec& problem, const grid::RadialGrid& grid,
                                       const IterationConfig& config) {
    problem.validate();
    DiscreteSystem system{1, problem.p, problem.N, problem.beta, {}, {}};
    std::vector<double> summed(grid.size(), 0.0);
    for (const auto& a : problem.coefficients) {
        const auto samples = sample_coefficient(a, grid);
        for (std::size_t k = 0; k < summed.size(); ++k) summed[k] += samples[k];
    }
    system.coefficient.push_back(std::move(summed));
    system.nonlinearity = [fs = problem.nonlinearities, m = problem.m](
                              std::span<const double> state, std::span<double> out) {
        const std::vector<double> diagonal(m, state[0]);
        double total = 0.0;
        for (const auto& f : fs) total += f(diagonal);
        out[0] = total;
    };

    SolveResult solved = RadialOperator(std::move(system), grid).iterate(config);
    AuxiliaryResult result{{grid, std::move(solved.profiles.profiles[0])},
                           std::move(solved.report),
                           {}};
    for (auto& h : solved.history) result.history.emplace_back(grid, std::move(h.profiles[0]));
    return result;
}

Sandwich build_sandwich(const ProblemSpec& problem, const grid::RadialGrid& grid,
                        const IterationConfig& config) {
    problem.validate();
    const std::size_t m = problem.m;

    if (problem.coefficients_lower) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto phi = sample_coefficient(problem.coefficients[j], grid);
            const auto psi = sample_coefficient((*problem.coefficients_lower)[j], grid);
            for (std::size_t k = 0; k < grid.size(); ++k)
                if (psi[k] > phi[k])
                    throw InvalidProblem("lower coefficient " + std::to_string(j + 1) +
                                         " exceeds the upper one at r = " +
                                         std::to_string(grid[k]));
        }
    }

    DiscreteSystem lower_system = discretize(problem, grid, false);
    lower_system.beta = 1.0 / static_cast<double>(m);
    SolveResult lower = RadialOperator(std::move(lower_system), grid).iterate(config);
    if (lower.report.capped)
        throw SandwichFailed("lower solve exceeded value_cap: no bounded lower profile on [0, " +
                             std::to_string(grid.r_max()) + "]");
    if (!lower.report.converged) throw SandwichFailed("lower solve did not converge");

    double M = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double sum = 0.0;
        for (const auto& u : lower.profiles.profiles) sum += u[k];
        M = std::max(M, sum);
    }

    DiscreteSystem upper_system = discretize(problem, grid, true);
    upper_system.beta = M;
    if (!(config.value_cap > M))
        throw SandwichFailed("value_cap does not exceed M = " + std::to_string(M));
    SolveResult upper = RadialOperator(std::move(upper_system), grid).iterate(config);
    if (upper.report.capped) throw SandwichFailed("upper solve exceeded value_cap");
    if (!upper.report.converged) throw SandwichFailed("upper solve did not converge");

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (lower.profiles.profiles[i][k] > M || upper.profiles.profiles[i][k] < M)
                throw Error("sandwich ordering violated at component " + std::to_string(i + 1) +
                            ", node " + std::to_string(k));

    return {std::move(lower.profiles), M, std::move(upper.profiles), std::move(lower.report),
            std::move(upper.report)};
}

}  // namespace plap::solver
