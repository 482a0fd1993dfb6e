#include "plap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "plap/error.hpp"

namespace plap::verify {

ResidualReport fixed_point_residual(const solver::ProblemSpec& problem,
                                    const grid::RadialGrid& grid,
                                    const solver::ProfileSet& profiles) {
    if (profiles.components() != problem.m)
        throw InvalidArgument("profile count does not match m");
    for (const auto& u : profiles.profiles)
        if (u.size() != grid.size()) throw InvalidArgument("profile length does not match grid");

    ResidualReport report;
    const solver::ProfileSet image = solver::picard_step(problem, grid, profiles);
    for (std::size_t i = 0; i < problem.m; ++i) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double d = std::abs(image.profiles[i][k] - profiles.profiles[i][k]);
            if (d > report.sup_fixed_point_residual) {
                report.sup_fixed_point_residual = d;
                report.node_of_max = k;
                report.component_of_max = i;
            }
        }
    }

    const auto r = grid.nodes();
    const double p = problem.p;
    const double n1 = problem.N - 1.0;
    std::vector<double> state(problem.m);
    for (std::size_t k = 2; k + 2 < r.size(); ++k) {
        for (std::size_t i = 0; i < problem.m; ++i) state[i] = profiles.profiles[i][k];
        for (std::size_t i = 0; i < problem.m; ++i) {
            const auto& u = profiles.profiles[i];
            const double h1 = r[k] - r[k - 1], h2 = r[k + 1] - r[k];
            const double denom = h1 * h2 * (h1 + h2);
            const double ahead = u[k + 1] - u[k], behind = u[k] - u[k - 1];
            const double du = std::max(0.0, (h1 * h1 * ahead + h2 * h2 * behind) / denom);
            const double d2u = 2.0 * (h1 * ahead - h2 * behind) / denom;

            double diffusion = 0.0;
            if (p == 2.0)
                diffusion = d2u;
            else if (du > 0.0)
                diffusion = (p - 1.0) * std::pow(du, p - 2.0) * d2u;
            const double flux = n1 / r[k] * std::pow(du, p - 1.0);
            const double forcing = problem.coefficients[i](r[k]) * problem.nonlinearities[i](state);
            report.sup_ode_residual_interior =
                std::max(report.sup_ode_residual_interior, std::abs(diffusion + flux - forcing));
        }
    }
    return report;
}

std::optional<solver::MonotoneViolation> check_monotone_in_k(
    std::span<const solver::ProfileSet> history) {
    for (std::size_t k = 1; k < history.size(); ++k) {
        const auto& prev = history[k - 1].profiles;
        const auto& cur = history[k].profiles;
        for (std::size_t i = 0; i < std::min(prev.size(), cur.size()); ++i)
            for (std::size_t node = 0; node < std::min(prev[i].size(), cur[i].size()); ++node) {
                const double w = prev[i][node];
                if (cur[i][node] < w - solver::kMonotoneSlack * (1.0 + std::abs(w)))
                    return solver::MonotoneViolation{static_cast<int>(k), i, node,
                                                     w - cur[i][node]};
            }
    }
    return std::nullopt;
}

bool nondecreasing_in_r(const solver::ProfileSet& profiles, double beta) {
    for (const auto& u : profiles.profiles) {
        if (u.empty() || std::abs(u.front() - beta) > 1e-12 * (1.0 + beta)) return false;
        for (std::size_t k = 1; k < u.size(); ++k)
            if (u[k] < u[k - 1]) return false;
    }
    return true;
}

std::string_view to_string(GrowthKind kind) noexcept {
    switch (kind) {
        case GrowthKind::Saturating: return "Saturating";
        case GrowthKind::Growing: return "Growing";
        case GrowthKind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

GrowthReport classify_growth(const solver::ProblemSpec& problem, double base_R, int doublings,
                             const solver::IterationConfig& config, std::size_t points,
                             const GrowthSettings& settings) {
    if (doublings < 2) throw InvalidArgument("classify_growth needs at least 2 doublings");
    if (!(base_R > 0.0)) throw InvalidArgument("base radius must be positive");
    if (points < grid::kMinPoints) throw InvalidArgument("too few grid points per base radius");
    problem.validate();
    config.validate(problem.beta);

    solver::IterationConfig quiet = config;
    quiet.record_history = false;

    std::vector<std::future<solver::SolveResult>> solves;
    GrowthReport report;
    for (int k = 0; k <= doublings; ++k) {
        const double R = std::ldexp(base_R, k);
        report.domain_radii.push_back(R);
        const std::size_t n = (points - 1) * (std::size_t{1} << k) + 1;
        solves.push_back(std::async(std::launch::async, [&problem, quiet, R, n] {
            return solver::solve_radial_system(problem, grid::make_grid(R, n), quiet);
        }));
    }
    bool any_capped = false, any_stalled = false;
    for (auto& f : solves) {
        const solver::SolveResult r = f.get();
        report.sup_values.push_back(r.profiles.sup());
        report.iterations.push_back(r.report.iterations_used);
        report.converged.push_back(r.report.converged);
        report.capped.push_back(r.report.capped);
        any_capped = any_capped || r.report.capped;
        any_stalled = any_stalled || (!r.report.converged && !r.report.capped);
    }
    for (std::size_t k = 1; k < report.sup_values.size(); ++k)
        report.slopes.push_back(std::log2(report.sup_values[k] / report.sup_values[k - 1]));

    if (any_capped) {
        report.classification = GrowthKind::Growing;
        report.exponent_estimate = std::numeric_limits<double>::infinity();
        report.note = "value_cap reached; growth exponent unbounded on these domains";
        return report;
    }
    report.exponent_estimate = report.slopes.back();
    if (any_stalled) {
        report.classification = GrowthKind::Inconclusive;
        report.note = "a solve stopped at max_iterations without converging";
        return report;
    }

    const std::size_t n = report.sup_values.size();
    const double rel_last =
        (report.sup_values[n - 1] - report.sup_values[n - 2]) / report.sup_values[n - 2];
    const double last = report.slopes[report.slopes.size() - 1];
    const double before = report.slopes[report.slopes.size() - 2];
    if (rel_last < settings.saturation_tolerance) {
        report.classification = GrowthKind::Saturating;
    } else if (last > settings.min_growth_exponent &&
               (last >= before || std::abs(last - before) <= settings.slope_stability * last)) {
        report.classification = GrowthKind::Growing;
    } else {
        report.classification = GrowthKind::Inconclusive;
        report.note = "slopes have not stabilized";
    }
    return report;
}

}  // namespace plap::verify
