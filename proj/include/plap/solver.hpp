#pragma once

// Monotone successive approximation for the radial p-Laplacian system
//
//   (p-1)(u_i')^{p-2} u_i'' + ((N-1)/r)(u_i')^{p-1} = a_i(r) f_i(u_1, ..., u_m),
//
// written as the fixed point
//
//   u_i(r) = beta + ∫_0^r ( t^{1-N} ∫_0^t s^{N-1} a_i(s) f_i(u(s)) ds )^{1/(p-1)} dt.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plap/expr.hpp"
#include "plap/grid.hpp"

namespace plap::solver {

struct ProblemSpec {
    std::size_t m = 1;
    double p = 2.0;
    int N = 3;
    /// a_j(r), or the spherical maxima phi_j(r) in sandwich mode.
    std::vector<expr::Expression> coefficients;
    /// Spherical minima psi_j(r); absent for radial coefficients.
    std::optional<std::vector<expr::Expression>> coefficients_lower;
    /// f_j(u1, ..., um).
    std::vector<expr::Expression> nonlinearities;
    double beta = 1.0;

    /// Throws InvalidProblem on violated invariants.
    void validate() const;
    bool is_radial() const noexcept { return !coefficients_lower.has_value(); }
};

/// Parses the expression sources; beta defaults to 1/m.
ProblemSpec make_problem(std::size_t m, double p, int N,
                         const std::vector<std::string>& coefficients,
                         const std::vector<std::string>& nonlinearities,
                         std::optional<double> beta = std::nullopt,
                         const std::optional<std::vector<std::string>>& coefficients_lower =
                             std::nullopt);

struct IterationConfig {
    int max_iterations = 500;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    /// Divergence guard: the solve stops as soon as a value exceeds it.
    double value_cap = 1e12;
    /// Keep every iterate (including the constant start) in the result.
    bool record_history = false;

    void validate(double beta) const;
};

struct ProfileSet {
    grid::RadialGrid grid;
    std::vector<std::vector<double>> profiles;

    static ProfileSet constant(const grid::RadialGrid& grid, std::size_t m, double value);
    std::size_t components() const noexcept { return profiles.size(); }
    double sup() const noexcept;
};

struct MonotoneViolation {
    int iteration;
    std::size_t component;
    std::size_t node;
    double magnitude;
};

struct SolveReport {
    int iterations_used = 0;
    bool converged = false;
    bool capped = false;
    std::vector<double> sup_deltas;
    /// sup |T[u] - u| of the returned profiles; NaN when capped.
    double final_residual = 0.0;
    std::optional<MonotoneViolation> monotone_in_k_violation;
};

struct SolveResult {
    ProfileSet profiles;
    SolveReport report;
    std::vector<ProfileSet> history;
};

/// Relative slack allowed when comparing successive iterates.
inline constexpr double kMonotoneSlack = 1e-12;

/// One application of the fixed-point map to `current` (Jacobi update).
ProfileSet picard_step(const ProblemSpec& problem, const grid::RadialGrid& grid,
                       const ProfileSet& current);

SolveResult solve_radial_system(const ProblemSpec& problem, const grid::RadialGrid& grid,
                                const IterationConfig& config);

struct AuxiliaryResult {
    grid::GridFunction z;
    SolveReport report;
    std::vector<grid::GridFunction> history;
};

/// Scalar majorant Δ_p z = (Σ a_i(r)) (Σ f_i(z, ..., z)), z(0) = beta.
AuxiliaryResult solve_auxiliary_scalar(const ProblemSpec& problem, const grid::RadialGrid& grid,
                                       const IterationConfig& config);

struct Sandwich {
    ProfileSet lower;
    double M;
    ProfileSet upper;
    SolveReport lower_report;
    SolveReport upper_report;
};

/// Lower profile from phi started at 1/m, M = sup of its component sum,
/// upper profile from psi started at M. Throws SandwichFailed when either
/// solve is capped or fails to converge.
Sandwich build_sandwich(const ProblemSpec& problem, const grid::RadialGrid& grid,
                        const IterationConfig& config);

// ---------------------------------------------------------------------------
// Discretized form shared by the system, scalar majorant and sandwich solves.

using NonlinearityMap = std::function<void(std::span<const double> state, std::span<double> out)>;

struct DiscreteSystem {
    std::size_t m;
    double p;
    int N;
    double beta;
    std::vector<std::vector<double>> coefficient;  // [component][node]
    NonlinearityMap nonlinearity;
};

DiscreteSystem discretize(const ProblemSpec& problem, const grid::RadialGrid& grid,
                          bool use_lower_coefficients = false);

class RadialOperator {
public:
    RadialOperator(DiscreteSystem system, const grid::RadialGrid& grid);

    const DiscreteSystem& system() const noexcept { return system_; }
    ProfileSet apply(const ProfileSet& current, int iteration) const;
    SolveResult iterate(const IterationConfig& config) const;

private:
    DiscreteSystem system_;
    grid::RadialGrid grid_;
    grid::RadialWeights weights_;
};

}  // namespace plap::solver
